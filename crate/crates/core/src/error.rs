use thiserror::Error;

/// Errors produced while building instances or running aggregation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("vectors must have at least one coordinate")]
    ZeroDimension,

    #[error("non-finite coordinate {value} at index {index}")]
    NonFinite { index: usize, value: f64 },

    #[error("{0}: input set is empty")]
    Empty(&'static str),

    #[error("{what}: need at least {needed} vectors, got {got}")]
    TooFewVectors {
        what: &'static str,
        needed: usize,
        got: usize,
    },

    #[error("{what}: capacity exceeded ({got} > {limit})")]
    Capacity {
        what: &'static str,
        limit: usize,
        got: usize,
    },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("equivocation: byzantine node {node} sends distinct vectors to different recipients")]
    Equivocation { node: usize },

    #[error("invalid dataset: {0}")]
    Dataset(String),

    #[error("malformed CSV row {row}: {reason}")]
    MalformedRow { row: usize, reason: String },

    #[error("io: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
