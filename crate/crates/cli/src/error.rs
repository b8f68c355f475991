use std::path::PathBuf;

use methagg_core::error::{FileError, FilterError, StudyError};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Bad flags, configuration or missing required settings.
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}:{line}: {message}")]
    Parse { path: String, line: u64, message: String },
    #[error(transparent)]
    Extract(#[from] FileError),
    #[error(transparent)]
    Study(#[from] StudyError),
    #[error(transparent)]
    Filter(#[from] FilterError),
    #[error("{0}")]
    Run(String),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    pub fn parse(path: &str, line: u64, message: impl Into<String>) -> Self {
        Error::Parse { path: path.to_string(), line, message: message.into() }
    }

    /// Process exit code: 2 for usage errors, 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Usage(_) => 2,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
