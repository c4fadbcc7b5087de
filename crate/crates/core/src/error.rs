//! Error taxonomy shared across the crate.

/// Convenience alias used by every fallible operation in this crate.
pub type Result<T> = std::result::Result<T, Error>;

/// Errors raised by model construction, evaluation, and checking.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A caller-supplied value lies outside the mathematical domain of the
    /// operation (non-positive velocity, time outside `[0, stop_time]`, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// Two trajectories or signals that must share a sample grid do not.
    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    /// Integration produced a non-finite state component.
    #[error("numeric blowup at t = {time}: {detail}")]
    NumericBlowup { time: f64, detail: String },

    /// An internal cross-check failed; indicates a bug, not a caller error.
    #[error("invariant violation: {0}")]
    InvariantViolation(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn grid_mismatch(msg: impl Into<String>) -> Self {
        Error::GridMismatch(msg.into())
    }

    pub(crate) fn invariant(msg: impl Into<String>) -> Self {
        Error::InvariantViolation(msg.into())
    }
}
