//! CLI error wrapper with the stable exit-code contract:
//! 0 success, 1 pipeline/validation failure, 2 I/O or argument failure.

use std::path::PathBuf;

#[derive(Debug)]
pub enum CliError {
    Pipeline(darkdetect::Error),
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    Usage(String),
}

impl From<darkdetect::Error> for CliError {
    fn from(e: darkdetect::Error) -> Self {
        CliError::Pipeline(e)
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Pipeline(e) => write!(f, "{e}"),
            CliError::Io { path, source } => write!(f, "cannot access {}: {source}", path.display()),
            CliError::Usage(msg) => write!(f, "{msg}"),
        }
    }
}

impl std::error::Error for CliError {}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io { .. } | CliError::Usage(_) => 2,
            CliError::Pipeline(e) if e.is_io() => 2,
            CliError::Pipeline(_) => 1,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Io { .. } => "io",
            CliError::Pipeline(e) => match e {
                darkdetect::Error::Io { .. } => "io",
                darkdetect::Error::MalformedRow { .. } => "malformed_row",
                darkdetect::Error::UnknownLabel { .. } => "unknown_label",
                darkdetect::Error::InvalidConfig(_) => "invalid_config",
                darkdetect::Error::EmptyCorpus => "empty_corpus",
                darkdetect::Error::ClassTooSmall { .. } => "class_too_small",
                darkdetect::Error::DegenerateSplit { .. } => "degenerate_split",
                darkdetect::Error::EmptyVocabulary => "empty_vocabulary",
                darkdetect::Error::EmptyDataset => "empty_dataset",
                darkdetect::Error::SingleClass => "single_class",
                darkdetect::Error::DimensionMismatch { .. } => "dimension_mismatch",
                darkdetect::Error::NonFinite(_) => "non_finite",
                darkdetect::Error::Divergence { .. } => "divergence",
                darkdetect::Error::ModelVersion { .. } => "model_version",
                darkdetect::Error::ModelChecksum { .. } => "model_checksum",
                darkdetect::Error::ModelIntegrity(_) => "model_integrity",
                darkdetect::Error::ModelFormat(_) => "model_format",
            },
        }
    }

    /// One machine-readable JSON line for stderr.
    pub fn machine_line(&self) -> String {
        serde_json::json!({
            "error": { "kind": self.kind(), "message": self.to_string() }
        })
        .to_string()
    }
}
