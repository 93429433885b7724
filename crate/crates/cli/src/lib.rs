//! Library surface of the darkdetect CLI: subcommand options, command
//! implementations, run manifests, and the exit-code contract.

pub mod commands;
pub mod error;
pub mod manifest;

pub use commands::{dispatch, Cli, Command};
pub use error::CliError;
