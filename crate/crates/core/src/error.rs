use thiserror::Error;

/// Failures reported by the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("argument outside domain: {0}")]
    Domain(String),
    #[error("quadrature did not converge: error estimate {estimate:e} above tolerance {tolerance:e}")]
    NonConvergence { estimate: f64, tolerance: f64 },
    #[error("tail of the r-sum could not be certified: {0}")]
    TailNotCertified(String),
    #[error("spline order {order} exceeds the configured maximum {max}")]
    OrderTooHigh { order: usize, max: usize },
    #[error("moment problem has no solution: {0}")]
    UnsolvableMoment(String),
    #[error("moment system is ill-conditioned (condition number {0:e})")]
    IllConditioned(f64),
    #[error("root bracket failure: {0}")]
    Bracket(String),
}

pub type Result<T> = std::result::Result<T, Error>;
