use thiserror::Error;

/// Failure modes shared by every module.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Inputs violate a precondition (bad parameters, out-of-range sizes).
    #[error("validation error: {0}")]
    Validation(String),

    /// Argument outside the mathematical domain of the function.
    #[error("domain error: {0}")]
    Domain(String),

    /// Result does not fit in binary64.
    #[error("range error: {0}")]
    Range(String),

    /// An iterative procedure did not settle within its budget.
    #[error("convergence error: {message} (best estimate {best_estimate:e})")]
    Convergence { message: String, best_estimate: f64 },

    /// A cross-check between two routes failed.
    #[error("integrity error: {relation} violated (residual {residual:e}, tolerance {tolerance:e})")]
    Integrity {
        relation: String,
        residual: f64,
        tolerance: f64,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
