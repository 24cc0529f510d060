//! Library surface of the scenario CLI: configuration, command
//! implementations, and the exit-code contract (0 = pass, 1 = check
//! failure, 2 = usage or config error).

pub mod commands;
pub mod config;

use std::path::PathBuf;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Invalid configuration or usage; maps to exit code 2.
    #[error("config error: {0}")]
    Config(String),

    /// Filesystem failure with path context; maps to exit code 1.
    #[error("i/o error at {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },

    /// Numerical engine failure; maps to exit code 1.
    #[error(transparent)]
    Engine(#[from] concom::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            _ => 1,
        }
    }
}
