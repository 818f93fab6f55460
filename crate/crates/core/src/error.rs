use thiserror::Error;

/// Errors raised by the benchmark suite, metrics and solvers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum EtmoError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("unknown instance ETMOF{0} (valid ids are 1..=40)")]
    UnknownInstance(usize),

    #[error("instance ETMOF{instance} has no task T{task}")]
    UnknownTask { instance: usize, task: usize },

    #[error("time instant: {0}")]
    TimeMismatch(String),

    #[error("unsupported combination: {0}")]
    Unsupported(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, EtmoError>;

pub(crate) fn invalid(msg: impl Into<String>) -> EtmoError {
    EtmoError::InvalidArgument(msg.into())
}
