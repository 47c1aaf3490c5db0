use thiserror::Error;

/// Errors produced anywhere in the toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("invalid solution: {0}")]
    InvalidSolution(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("node {node} out of range (instance has nodes 0..={max})")]
    NodeOutOfRange { node: usize, max: usize },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("enumeration of {count} solutions exceeds the limit of {limit}")]
    EnumerationTooLarge { count: u128, limit: u128 },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }
}
