use std::path::PathBuf;

use thiserror::Error;

/// Errors of the experiment harness.
///
/// Configuration and input errors are separated from runtime failures so the
/// CLI can report them with different exit codes.
#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("{origin}:{line}:{column}: {message}")]
    Parse { origin: String, line: usize, column: usize, message: String },

    #[error("{origin}: {message}")]
    Config { origin: String, message: String },

    #[error("{path}: {message}")]
    Schema { path: PathBuf, message: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Core(#[from] potpg_core::Error),
}

impl HarnessError {
    pub fn config(origin: impl Into<String>, message: impl Into<String>) -> Self {
        HarnessError::Config { origin: origin.into(), message: message.into() }
    }

    pub fn schema(path: impl Into<PathBuf>, message: impl Into<String>) -> Self {
        HarnessError::Schema { path: path.into(), message: message.into() }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        HarnessError::Io { path: path.into(), source }
    }

    /// Bad input (configuration, sample or result files) rather than a
    /// failure while running.
    pub fn is_input_error(&self) -> bool {
        matches!(self, HarnessError::Parse { .. } | HarnessError::Config { .. } | HarnessError::Schema { .. })
    }
}

pub type Result<T, E = HarnessError> = std::result::Result<T, E>;
