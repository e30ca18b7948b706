use thiserror::Error;

/// Errors raised by the quadric model.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension parameter m = {0} is not supported (need m >= 3)")]
    DimensionTooSmall(usize),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix is not in {what} (relative residual {residual:.3e})")]
    NotMember { what: &'static str, residual: f64 },

    #[error("non-finite entries in {0}")]
    NonFinite(&'static str),

    #[error("expected a unit vector, got norm {0}")]
    NotUnit(f64),

    #[error("invalid frame: {0}")]
    InvalidFrame(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("invalid radius r = {0} (tubes need r > 0)")]
    InvalidRadius(f64),

    #[error("contact constant k = {0} must be positive")]
    InvalidContactConstant(f64),

    #[error("Jacobi field too small ({0:.3e}) to form the shape operator; r is at or near a focal point")]
    NearFocal(f64),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;
