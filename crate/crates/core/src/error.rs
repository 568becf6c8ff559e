use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Coarse error family, used by front ends to pick exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    /// Inputs are malformed (bad shapes, out-of-range parameters).
    Input,
    /// A physical precondition of a builder or experiment is violated.
    Precondition,
    /// The truncated Fock space cannot hold the requested state.
    Truncation,
    /// A numerical routine failed to converge.
    Numerical,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("space signature mismatch: {0}")]
    Signature(String),

    #[error("matrix is not Hermitian: defect {defect:.3e} exceeds tolerance {tolerance:.3e}")]
    NotHermitian { defect: f64, tolerance: f64 },

    #[error("invalid parameter `{name}`: {reason}")]
    Parameter { name: &'static str, reason: String },

    #[error("regime precondition violated: {0}")]
    Regime(String),

    #[error("step guard violated: dt*max|H| = {product:.3e} > {limit}")]
    StepGuard { product: f64, limit: f64 },

    #[error("truncation: {message} (requires dimension >= {required_dim})")]
    Truncation {
        message: String,
        required_dim: usize,
    },

    #[error("eigendecomposition did not converge for dimension {0}")]
    Eigen(usize),

    #[error("no convergence after {halvings} step halvings (last change {change:.3e}, tolerance {tolerance:.1e})")]
    NotConverged {
        halvings: usize,
        change: f64,
        tolerance: f64,
    },
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::Signature(_) | Error::Parameter { .. } => ErrorClass::Input,
            Error::NotHermitian { .. } | Error::Regime(_) | Error::StepGuard { .. } => {
                ErrorClass::Precondition
            }
            Error::Truncation { .. } => ErrorClass::Truncation,
            Error::Eigen(_) | Error::NotConverged { .. } => ErrorClass::Numerical,
        }
    }

    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::Parameter {
            name,
            reason: reason.into(),
        }
    }
}
