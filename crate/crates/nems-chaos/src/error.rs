//! Error taxonomy for the runner, split by exit code.
//!
//! Everything the user can fix by editing the config file or command line is a
//! [`CliError::Config`] (exit code 2). Failures that occur while an otherwise
//! valid run executes — numerical errors propagated from the simulation core
//! or I/O errors while writing artifacts — are [`CliError::Runtime`]
//! (exit code 3).

use std::path::PathBuf;

/// Top-level runner error.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// The requested run is malformed; nothing was computed.
    #[error("configuration error: {0}")]
    Config(String),
    /// A valid run failed while executing.
    #[error("runtime error: {0}")]
    Runtime(String),
}

impl CliError {
    /// Process exit code mandated for this error class.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Runtime(_) => 3,
        }
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }

    pub(crate) fn io(path: &PathBuf, err: std::io::Error) -> Self {
        CliError::Runtime(format!("while writing {}: {err}", path.display()))
    }
}

impl From<nems_core::Error> for CliError {
    fn from(err: nems_core::Error) -> Self {
        CliError::Runtime(format!("simulation failed: {err}"))
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
