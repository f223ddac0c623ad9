use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid argument: {0}")]
    Validation(String),
    #[error("cannot read {path}: {reason}")]
    UnreadableInput { path: PathBuf, reason: String },
    #[error("unsupported image format: {0}")]
    UnsupportedFormat(String),
    #[error("cannot write {path}: {reason}")]
    Write { path: PathBuf, reason: String },
    #[error("{failed} of {total} verification checks failed")]
    VerificationFailed { failed: usize, total: usize },
    #[error(transparent)]
    Core(#[from] monogenic_core::Error),
}

impl CliError {
    /// 0 success, 1 validation, 2 I/O, 3 verification failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) | CliError::Core(_) => 1,
            CliError::UnreadableInput { .. } | CliError::UnsupportedFormat(_) | CliError::Write { .. } => 2,
            CliError::VerificationFailed { .. } => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
