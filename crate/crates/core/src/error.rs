//! Error type shared by the whole pipeline.

use std::path::PathBuf;

/// All failure modes of the library.
///
/// `is_io` distinguishes environment failures (unreadable files, bad
/// paths) from pipeline/validation failures; the CLI maps the former to
/// exit code 2 and the latter to exit code 1.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("cannot access {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed dataset row {row}: {message}")]
    MalformedRow { row: usize, message: String },

    #[error("unrecognized label token {token:?} on row {row}")]
    UnknownLabel { row: usize, token: String },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("corpus is empty")]
    EmptyCorpus,

    #[error("class {label:?} has {count} documents, need at least {needed}")]
    ClassTooSmall {
        label: &'static str,
        count: usize,
        needed: usize,
    },

    #[error("degenerate split: train={train} test={test} documents")]
    DegenerateSplit { train: usize, test: usize },

    #[error("vocabulary is empty after pruning")]
    EmptyVocabulary,

    #[error("dataset has no samples")]
    EmptyDataset,

    #[error("training data contains a single class")]
    SingleClass,

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("non-finite value: {0}")]
    NonFinite(String),

    #[error("training diverged at iteration {iteration}: loss is not finite")]
    Divergence { iteration: usize },

    #[error("unsupported model format version {found} (expected {expected})")]
    ModelVersion { found: u64, expected: u64 },

    #[error("model checksum mismatch: file says {stored}, computed {computed}")]
    ModelChecksum { stored: u32, computed: u32 },

    #[error("model file integrity violation: {0}")]
    ModelIntegrity(String),

    #[error("malformed model file: {0}")]
    ModelFormat(String),
}

impl Error {
    /// True for environment/I-O failures, false for pipeline and
    /// validation failures.
    pub fn is_io(&self) -> bool {
        matches!(self, Error::Io { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
