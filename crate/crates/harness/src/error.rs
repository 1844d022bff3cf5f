use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = HarnessError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("stream line {line}: {message}")]
    Stream { line: usize, message: String },

    #[error("{0}")]
    Validation(String),

    #[error("config {}: {message}", path.display())]
    Config { path: PathBuf, message: String },

    #[error(transparent)]
    Core(#[from] carpe_core::Error),
}

impl HarnessError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Self::Io { path: path.into(), source }
    }

    pub(crate) fn stream(line: usize, message: impl Into<String>) -> Self {
        Self::Stream { line, message: message.into() }
    }

    /// Process exit code: 2 for I/O failures, 1 for everything the user can
    /// fix in their inputs.
    pub fn exit_code(&self) -> u8 {
        match self {
            HarnessError::Io { .. } => 2,
            _ => 1,
        }
    }
}
