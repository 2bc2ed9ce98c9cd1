use thiserror::Error;

/// Errors produced by the qtorus library.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// Two values built over different Planck parameters were combined.
    #[error("Planck parameter mismatch: N = {left} vs N = {right}")]
    PlanckMismatch { left: u32, right: u32 },

    /// Matrix dimensions (or a matrix and an algebra element) do not agree.
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    /// A scalar argument violated its contract (e.g. M <= 0, grid < 2).
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// An input lies outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A truncated series did not reach the requested tolerance.
    #[error("series did not converge: tail bound {achieved:e} above tolerance {tolerance:e}")]
    Convergence { achieved: f64, tolerance: f64 },

    /// A matrix expected to be unitary failed the unitarity check.
    #[error("matrix is not unitary: ||F^dag F - I|| = {deviation:e}")]
    NotUnitary { deviation: f64 },

    /// Malformed or out-of-schema serialized input.
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
