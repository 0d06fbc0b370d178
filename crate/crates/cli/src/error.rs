use std::path::PathBuf;
use thiserror::Error;
use transonic_core::{Error as CoreError, ErrorClass};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config {path}: {message}")]
    Config { path: PathBuf, message: String },
    #[error("sweep axis has no amplitudes")]
    EmptySweep,
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Dump { path: PathBuf, message: String },
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error("thread pool: {0}")]
    Threads(String),
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Self::Io { path: path.into(), source }
    }

    /// Process exit code: 2 config, 3 physics precondition, 4 divergence.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) => class_code(e.class()),
            CliError::Config { .. } | CliError::EmptySweep | CliError::Dump { .. } | CliError::Threads(_) => 2,
            CliError::Io { .. } | CliError::Json(_) => 1,
        }
    }
}

pub fn class_code(class: ErrorClass) -> i32 {
    match class {
        ErrorClass::Input => 2,
        ErrorClass::Physics => 3,
        ErrorClass::Divergence => 4,
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
