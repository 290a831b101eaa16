use thiserror::Error;

/// Errors raised by the core library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum DthoError {
    #[error("invalid inner function: {0}")]
    InvalidInner(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("missing parameter `{0}`")]
    MissingParameter(&'static str),

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("grid of {grid} points is too coarse for bandwidth {bandwidth}; need at least {needed}")]
    GridTooSmall { grid: usize, bandwidth: u64, needed: usize },

    #[error("basis mismatch: {0}")]
    BasisMismatch(String),

    #[error("matrix is not a dual truncated Hankel operator (inconsistency {inconsistency:.3e})")]
    NotADtho { inconsistency: f64 },

    #[error("parse error in {what}: {reason}")]
    Parse { what: &'static str, reason: String },

    #[error("unknown check tag `{0}`")]
    UnknownTag(String),
}

pub type Result<T> = std::result::Result<T, DthoError>;
