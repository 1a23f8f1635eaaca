use std::path::{Path, PathBuf};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error("config error at `{path}`: {message}")]
    Schema { path: String, message: String },

    #[error("construction failed: {0}")]
    Construction(#[from] qchain_core::Error),

    #[error("verification failed: {}", failed.join(", "))]
    Verification { failed: Vec<String> },

    #[error("I/O error on {}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        Self::Io { path: path.to_path_buf(), source }
    }

    /// Process exit status.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Verification { .. } => 1,
            CliError::Usage(_) | CliError::Schema { .. } => 2,
            CliError::Construction(_) => 3,
            CliError::Io { .. } => 4,
        }
    }
}
