use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid shape: {0}")]
    InvalidShape(String),

    #[error("shape mismatch: expected {expected}, found {found}")]
    ShapeMismatch { expected: String, found: String },

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("index out of range: {what} = {index}, limit {limit}")]
    IndexOutOfRange {
        what: &'static str,
        index: usize,
        limit: usize,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("duplicate vertex: states {0} and {1} are equal")]
    DuplicateVertex(usize, usize),

    #[error("vertex {0} is a convex combination of the other vertices")]
    RedundantVertex(usize),

    #[error("box violates no-signaling: {0}")]
    Signaling(String),

    #[error("LP dimension mismatch: {0}")]
    LpDimension(String),

    #[error("{what} exceeds configured cap: requested {requested}, cap {cap}")]
    CapExceeded {
        what: &'static str,
        requested: u128,
        cap: u128,
    },

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("invariant violated: {0}")]
    Invariant(String),
}

pub type Result<T> = std::result::Result<T, Error>;
