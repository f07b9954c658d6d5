use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid exponent {0}: must lie in [1, inf]")]
    InvalidExponent(f64),
    #[error("space dimension must be at least 1")]
    EmptySpace,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("field mismatch: {0}")]
    FieldMismatch(String),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("operation undefined at the zero vector")]
    ZeroVector,
    #[error("operation undefined at the zero operator")]
    ZeroOperator,
    #[error("vector is not of unit norm (norm = {0})")]
    NotUnitVector(f64),
    #[error("brute-force oracle limited to small domains: dimension {dim} is too large")]
    DimensionTooLarge { dim: usize },
    #[error("hypothesis not satisfied: {name} (margin {margin:.3e})")]
    HypothesisNotSatisfied { name: String, margin: f64 },
    #[error("no Singer certificate found among candidates (feasibility residual {residual:.3e})")]
    CertificateNotFound { residual: f64 },
    #[error("empty tuple")]
    EmptyTuple,
    #[error("{0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
