use thiserror::Error;

use crate::quad::QuadError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("overflow: {0}")]
    Overflow(String),
    #[error("divergent integral: {0}")]
    DivergentIntegral(String),
    #[error("grid too coarse: refinement changed the result by {relative_change:e} (relative)")]
    GridTooCoarse { relative_change: f64 },
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("quadrature failed: {0}")]
    QuadratureFail(String),
    #[error("truncation error: {0}")]
    Truncation(String),
    #[error("support error: {0}")]
    Support(String),
}

impl From<QuadError> for Error {
    fn from(e: QuadError) -> Self {
        Error::QuadratureFail(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
