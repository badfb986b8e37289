use std::path::PathBuf;

use enclosure_core::Error as CoreError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LabError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("malformed {what}: {msg}")]
    Format { what: String, msg: String },
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error("gate rejection: {0}")]
    Gate(String),
    #[error("tolerance breach: {0}")]
    Tolerance(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

pub type LabResult<T> = std::result::Result<T, LabError>;

impl LabError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Self::Io { path: path.into(), source }
    }

    pub fn format(what: &str, msg: impl ToString) -> Self {
        Self::Format { what: what.into(), msg: msg.to_string() }
    }

    /// 0 ok, 1 io, 2 validation, 3 tolerance breach, 4 gate rejection.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) | Self::Format { .. } => 2,
            Self::Core(e) => match e {
                CoreError::AllRejected { .. } | CoreError::InsufficientSamples { .. } | CoreError::IllConditioned { .. } => 4,
                _ => 2,
            },
            Self::Gate(_) => 4,
            Self::Tolerance(_) => 3,
            Self::Io { .. } => 1,
        }
    }
}
