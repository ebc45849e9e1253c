use thiserror::Error;

/// Errors raised by the norm, bracket and experiment routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GaugeError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("unsupported space: {0}")]
    UnsupportedSpace(String),

    #[error("size {size} exceeds the enumeration cutoff {cutoff}")]
    SizeOverCutoff { size: usize, cutoff: usize },

    #[error("wrong space pair: {0}")]
    WrongSpacePair(String),

    #[error("matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:e})")]
    NotPsd { min_eigenvalue: f64 },

    #[error("zero operator cannot be normalized")]
    ZeroOperator,

    #[error("zero diagonal entry at index {0}")]
    ZeroDiagonal(usize),

    #[error("matrix lies outside the elliptope: {0}")]
    OutsideElliptope(String),

    #[error("dimension cap exceeded: {size} > {cap}")]
    CapExceeded { size: usize, cap: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, GaugeError>;
