use thiserror::Error;

/// Errors raised by the toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("function must be total on the hypercube")]
    PartialFunction,
    #[error("matrix contains undefined (*) entries")]
    PartialMatrix,
    #[error("parameter out of range: {0}")]
    OutOfRange(String),
    #[error("arity mismatch: expected {expected}, got {actual}")]
    Arity { expected: usize, actual: usize },
    #[error("size cap exceeded: {0}")]
    TooLarge(String),
    #[error("precondition failed at index {index}: {reason}")]
    Precondition { index: usize, reason: String },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("solver failure: {0}")]
    Solver(String),
}

pub type Result<T> = std::result::Result<T, Error>;
