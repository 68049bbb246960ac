use thiserror::Error;

/// Errors raised by the analytical and simulation routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument is outside the range an operation accepts.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    /// A value lies outside the mathematical domain of a function.
    #[error("domain error: {0}")]
    Domain(String),
    /// Adaptive quadrature exhausted its evaluation budget.
    #[error(
        "quadrature did not converge after {evaluations} evaluations \
         (estimate {estimate:e}, error bound {error_bound:e})"
    )]
    Convergence {
        estimate: f64,
        error_bound: f64,
        evaluations: usize,
    },
    /// A result violated an identity it must satisfy (e.g. a probability
    /// outside [0, 1] by more than rounding).
    #[error("internal inconsistency: {0}")]
    Inconsistency(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
