use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("grouping d={d} is incompatible with truncation dimension {dim} (2d must divide it)")]
    TruncationIncompatible { d: usize, dim: usize },

    #[error("bit depth exceeded: need 2^{needed} <= {dim}")]
    DepthExceeded { needed: u32, dim: usize },

    #[error("index {index} out of range for dimension {dim}")]
    OutOfRange { index: usize, dim: usize },

    #[error("correlation {0} outside [-1, 1]")]
    InvalidCorrelation(f64),

    #[error("internal consistency: {0}")]
    Consistency(String),
}

impl Error {
    /// Stable short code used in machine-readable error lines.
    pub fn code(&self) -> &'static str {
        match self {
            Error::InvalidParameter(_) => "invalid-parameter",
            Error::DimensionMismatch { .. } => "dimension-mismatch",
            Error::TruncationIncompatible { .. } => "truncation-incompatible",
            Error::DepthExceeded { .. } => "depth-exceeded",
            Error::OutOfRange { .. } => "out-of-range",
            Error::InvalidCorrelation(_) => "invalid-correlation",
            Error::Consistency(_) => "internal-consistency",
        }
    }
}
