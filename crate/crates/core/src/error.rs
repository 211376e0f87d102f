//! Error type shared by all solver modules.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A precondition on the inputs was violated.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A derivative order beyond what the solvers need was requested.
    #[error("unsupported derivative order {order} (maximum {max})")]
    UnsupportedOrder { order: usize, max: usize },

    /// A floating-point computation failed (singular system, non-finite
    /// values, divergent series). Carries a condition estimate when one
    /// is available.
    #[error("numeric failure: {msg}")]
    Numeric { msg: String, condition: Option<f64> },

    /// The Jacobian of a Newton step is singular to working precision.
    #[error("jacobian is singular to working precision")]
    SingularJacobian,

    /// A point outside the closed solution domain was passed without the
    /// extrapolation flag.
    #[error("point outside the solution domain: {0}")]
    DomainError(String),

    /// Boundary data is inconsistent at the domain corners.
    #[error("inconsistent boundary constraints: {0}")]
    InvalidConstraints(String),

    /// A dual solution was evaluated with the formula of a different
    /// solver variant.
    #[error("solution variant mismatch: {0}")]
    VariantMismatch(String),

    /// Every hyperparameter candidate produced a non-finite score.
    #[error("hyperparameter tuning failed: {0}")]
    TuningFailure(String),
}

impl Error {
    pub(crate) fn numeric(msg: impl Into<String>) -> Self {
        Error::Numeric { msg: msg.into(), condition: None }
    }

    pub(crate) fn numeric_cond(msg: impl Into<String>, condition: f64) -> Self {
        Error::Numeric { msg: msg.into(), condition: Some(condition) }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
