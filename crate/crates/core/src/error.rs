use thiserror::Error;

/// Errors raised anywhere in the toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not Hermitian (relative asymmetry {0:.3e})")]
    NotHermitian(f64),
    #[error("matrix is not positive definite (smallest eigenvalue {0:.3e})")]
    NotPositiveDefinite(f64),
    #[error("Jacobi iteration did not converge after {0} sweeps")]
    NoConvergence(usize),
    #[error("dimension mismatch: {0} vs {1}")]
    DimMismatch(usize, usize),
    #[error("Schatten exponent must be >= 1, got {0}")]
    BadExponent(f64),
    #[error("Ky Fan order {k} outside 1..={dim}")]
    BadOrder { k: usize, dim: usize },
    #[error("invalid interval [{0}, {1}]")]
    BadInterval(f64, f64),
    #[error("kernel denominator vanishes at d = {0}")]
    PoleError(f64),
    #[error("kernel value overflows at d = {0}")]
    KernelOverflow(f64),
    #[error("unknown inequality case `{0}`")]
    UnknownCase(String),
    #[error("parameter outside the valid range: {0}")]
    RangeViolation(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("i/o failure: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;
