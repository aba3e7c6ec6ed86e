use thiserror::Error;

/// Errors produced by the clustering pipeline and its numerical kernels.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("length {0} is not a power of two >= 2")]
    NotPowerOfTwo(usize),

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {residual:e})")]
    NoConvergence { sweeps: usize, residual: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("frequency grid of size {grid} is too small for observation length {len} (need >= {min})")]
    GridTooSmall { grid: usize, len: usize, min: usize },

    #[error("degenerate observation: {0}")]
    Degenerate(String),

    #[error("unstable AR polynomial (largest root modulus {0})")]
    Unstable(f64),

    #[error("window is not admissible for the clustering condition: {0}")]
    InadmissibleWindow(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidParameter(msg.into()))
}
