use thiserror::Error;

/// Errors raised across the lab.
#[derive(Debug, Error)]
pub enum LabError {
    #[error("index {k} out of range 1..={n}")]
    IndexOutOfRange { k: usize, n: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("eigenvalue vector outside the operator cone (margin {margin:e})")]
    OutsideCone { margin: f64 },

    #[error("cone violated at {count} grid point(s), first at index {first}")]
    ConeViolation { count: usize, first: usize },

    #[error("form is not positive definite at grid point {point}")]
    NotPositiveDefinite { point: usize },

    #[error("form is not positive semidefinite at grid point {point} (min eigenvalue {min_eig:e})")]
    NotPositiveSemidefinite { point: usize, min_eig: f64 },

    #[error("non-finite value in {what} at index {index}")]
    NonFinite { what: &'static str, index: usize },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("solver lost positivity of the form after {iterations} iteration(s)")]
    PositivityLost { iterations: usize },

    #[error("solver did not converge after {iterations} iteration(s) (residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("differential inequality fails at grid point {point} (defect {defect:e})")]
    PreconditionFailed { point: usize, defect: f64 },

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, LabError>;
