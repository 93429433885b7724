//! Run manifests: every command records what it read, what it wrote,
//! and the exact configuration it resolved, so a run can be reproduced
//! and its artifacts verified by checksum.

use std::path::Path;
use std::time::Instant;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::CliError;

/// A file the run touched, with its SHA-256.
#[derive(Debug, Clone, Serialize)]
pub struct ArtifactRef {
    pub path: String,
    pub sha256: String,
}

/// One manifest per run. `config` holds the fully resolved options
/// (defaults materialized); `notes` carries free-form remarks such as
/// dataset substitutions and is omitted when empty.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub config: serde_json::Value,
    pub seed: u64,
    pub inputs: Vec<ArtifactRef>,
    pub outputs: Vec<ArtifactRef>,
    pub duration_ms: u64,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

pub fn sha256_file(path: &Path) -> Result<String, CliError> {
    let bytes = std::fs::read(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

/// Builder that accumulates artifacts while a command runs.
pub struct ManifestRecorder {
    command: String,
    config: serde_json::Value,
    seed: u64,
    inputs: Vec<ArtifactRef>,
    outputs: Vec<ArtifactRef>,
    notes: Vec<String>,
    started: Instant,
}

impl ManifestRecorder {
    pub fn new(command: &str, config: serde_json::Value, seed: u64) -> Self {
        ManifestRecorder {
            command: command.to_string(),
            config,
            seed,
            inputs: Vec::new(),
            outputs: Vec::new(),
            notes: Vec::new(),
            started: Instant::now(),
        }
    }

    pub fn record_input(&mut self, path: &Path) -> Result<(), CliError> {
        self.inputs.push(ArtifactRef {
            path: path.display().to_string(),
            sha256: sha256_file(path)?,
        });
        Ok(())
    }

    pub fn record_output(&mut self, path: &Path) -> Result<(), CliError> {
        self.outputs.push(ArtifactRef {
            path: path.display().to_string(),
            sha256: sha256_file(path)?,
        });
        Ok(())
    }

    pub fn add_notes(&mut self, notes: &[String]) {
        self.notes.extend_from_slice(notes);
    }

    pub fn finish(self) -> RunManifest {
        RunManifest {
            command: self.command,
            config: self.config,
            seed: self.seed,
            inputs: self.inputs,
            outputs: self.outputs,
            duration_ms: self.started.elapsed().as_millis() as u64,
            notes: self.notes,
        }
    }

    /// Finalize and write the manifest; `path = None` prints it to
    /// stderr instead (used by stream-oriented commands).
    pub fn write(self, path: Option<&Path>) -> Result<(), CliError> {
        let manifest = self.finish();
        let json = serde_json::to_string_pretty(&manifest)
            .expect("manifest serialization cannot fail");
        match path {
            Some(path) => std::fs::write(path, json.as_bytes()).map_err(|source| CliError::Io {
                path: path.to_path_buf(),
                source,
            }),
            None => {
                eprintln!("{json}");
                Ok(())
            }
        }
    }
}
