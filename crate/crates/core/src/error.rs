use thiserror::Error;

/// Errors raised by the numerical routines and the physics layer built on them.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("log-gamma pole at z = {re} + {im}i")]
    Pole { re: f64, im: f64 },

    #[error("quadrature did not converge: error estimate {estimate:e} exceeds tolerance {tolerance:e} after {evaluations} evaluations")]
    NonConvergence {
        estimate: f64,
        tolerance: f64,
        evaluations: usize,
    },

    #[error("integrand is not finite at x = {x}")]
    NonFiniteIntegrand { x: f64 },

    #[error("point {x} lies outside the open interval (0, {length})")]
    Domain { x: f64, length: f64 },

    #[error("state overflows near the endpoint at x = {x}")]
    Overflow { x: f64 },

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("integrand is not integrable: minimal mixed sine exponent {exponent} <= -1")]
    Integrability { exponent: f64 },
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }

    /// Whether the error stems from numerical non-convergence rather than bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NonConvergence { .. } | Error::NonFiniteIntegrand { .. } | Error::Overflow { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
