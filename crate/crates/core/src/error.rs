use thiserror::Error;

/// Errors raised by body, measure, quadrature and verification routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeomError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("invariant violated: {0}")]
    InvariantViolation(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    /// The direction hits a ridge of a polytope (a measure-zero set); perturb and retry.
    #[error("direction lies on a polytope ridge; perturb and retry")]
    Ridge,
    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, GeomError>;

pub(crate) fn invalid(msg: impl Into<String>) -> GeomError {
    GeomError::InvalidInput(msg.into())
}

pub(crate) fn unsupported(msg: impl Into<String>) -> GeomError {
    GeomError::Unsupported(msg.into())
}
