//! Command-line driver for the `pargrowth` experiments: single-shot
//! subcommands, the batch runner and the acceptance checks it executes.

pub mod checks;
pub mod commands;
pub mod config;
pub mod record;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),

    #[error("{0}")]
    Usage(String),

    #[error(transparent)]
    Lib(#[from] pargrowth::Error),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("verification failed: {0}")]
    Failed(String),
}

impl CliError {
    /// 1 for a failed verification, 2 for anything the caller got wrong.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Failed(_) => 1,
            _ => 2,
        }
    }
}
