use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid connection set: {0}")]
    InvalidConnectionSet(String),

    #[error("connection set is not inverse-closed")]
    NotInverseClosed,

    #[error("digraph is not symmetric")]
    NotSymmetric,

    #[error("size mismatch: expected {expected}, got {actual}")]
    SizeMismatch { expected: usize, actual: usize },

    #[error("not a bijection on {0} points")]
    NotBijection(usize),

    #[error("vertex {vertex} out of range for order {n}")]
    VertexOutOfRange { vertex: usize, n: usize },

    #[error("order {n} exceeds the oracle bound {bound}")]
    OracleBound { n: usize, bound: usize },

    #[error("enumeration bound exceeded: {0}")]
    EnumerationBound(String),

    #[error("digraph is not a firm circulant")]
    NotFirm,

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;
