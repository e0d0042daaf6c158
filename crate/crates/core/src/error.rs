use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("non-finite coordinate at index {index}")]
    NonFinite { index: usize },

    #[error("empty input: {0}")]
    Empty(&'static str),

    /// A vector that must be non-zero has norm below the degeneracy threshold.
    #[error("degenerate input: vector {index} is zero (norm {norm:e})")]
    ZeroVector { index: usize, norm: f64 },

    #[error("degenerate input: vector {index} is linearly dependent on its predecessors (residual {residual:e})")]
    RankDeficient { index: usize, residual: f64 },

    #[error("frame invariant violated: {0}")]
    Frame(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
