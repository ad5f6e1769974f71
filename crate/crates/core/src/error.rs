use thiserror::Error;

/// Errors produced by the toolkit.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// Malformed or mismatched inputs (wrong dimension, negative time, bad label).
    #[error("invalid input: {0}")]
    InvalidInput(String),
    /// A documented precondition of an operation was violated.
    #[error("precondition violated: {0}")]
    Precondition(String),
    /// A series or iteration exceeded its hard resource cap before converging.
    #[error("resource limit exceeded: {0}")]
    Resource(String),
}

pub type Result<T> = std::result::Result<T, Error>;
