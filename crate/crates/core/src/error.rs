use alloc::string::String;

/// Errors raised by the numerical routines in this crate.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// A parameter lies outside the domain of the routine.
    #[error("domain error: {0}")]
    Domain(String),
    /// Two fields or operators were built on different grids.
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    /// Input has the wrong length or shape.
    #[error("invalid input: {0}")]
    InvalidInput(String),
    /// An iterative method failed to reach its tolerance.
    #[error("no convergence after {iterations} iterations (residual {residual:e}): {context}")]
    NoConvergence {
        context: String,
        iterations: usize,
        residual: f64,
    },
    /// A time step of the forward solver failed.
    #[error("time step {step} failed: {reason}")]
    TimeStep { step: usize, reason: String },
    /// A linear system was singular or numerically rank deficient.
    #[error("singular system: {0}")]
    Singular(String),
    /// The requested eigenmodes are not resolved by the grid.
    #[error("under-resolved: {0}")]
    UnderResolved(String),
    /// The zero set of the Wronskian-like field is too large to excise.
    #[error("degenerate W: {0}")]
    DegenerateW(String),
}

pub type Result<T> = core::result::Result<T, Error>;

macro_rules! domain {
    ($($arg:tt)*) => { $crate::error::Error::Domain(alloc::format!($($arg)*)) };
}
macro_rules! invalid {
    ($($arg:tt)*) => { $crate::error::Error::InvalidInput(alloc::format!($($arg)*)) };
}
pub(crate) use domain;
pub(crate) use invalid;
