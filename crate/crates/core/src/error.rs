use thiserror::Error;

use crate::quadrature::IntegrationResult;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("invalid quadrature configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid interval [{a}, {b}]: need finite a < b")]
    InvalidInterval { a: f64, b: f64 },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("pole at {pole} lies on the integration boundary")]
    PoleOnBoundary { pole: f64 },

    #[error("poles at {first} and {second} are too close to excise separately")]
    PolesTooClose { first: f64, second: f64 },

    #[error("integrand is not finite near x = {near}")]
    NonFiniteIntegrand { near: f64 },

    /// The subdivision budget ran out. Carries the best estimate obtained.
    #[error(
        "quadrature did not converge: best estimate {} with error estimate {:.3e} after {} evaluations",
        .0.value, .0.error_estimate, .0.evaluations
    )]
    NonConvergence(Box<IntegrationResult>),

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("domain error: {0}")]
    DomainError(String),
}

impl Error {
    /// Best available estimate when the failure was a convergence failure.
    pub fn best_estimate(&self) -> Option<&IntegrationResult> {
        match self {
            Error::NonConvergence(best) => Some(best),
            _ => None,
        }
    }
}

pub(crate) fn require_positive(name: &str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("{name} must be positive (got {value})")))
    }
}
