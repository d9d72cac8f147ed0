use std::path::{Path, PathBuf};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("sweep plan rejected: {0}")]
    Plan(String),

    #[error("cannot access {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },

    #[error("malformed output in {path}: {reason}")]
    Output { path: PathBuf, reason: String },

    #[error("numerical failure: {0}")]
    Numerical(#[from] aurora_core::Error),

    #[error("diagnostic flags raised: {}", .0.join("; "))]
    Flags(Vec<String>),
}

impl HarnessError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        Self::Io { path: path.to_path_buf(), source }
    }

    /// Process exit status for this failure class.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) | Self::Plan(_) => 2,
            Self::Io { .. } | Self::Output { .. } => 3,
            Self::Numerical(_) => 4,
            Self::Flags(_) => 5,
        }
    }
}
