use thiserror::Error;

/// Errors raised by the simulator.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("operator is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("operator is not unitary (residual {residual:e})")]
    NotUnitary { residual: f64 },

    #[error("vector is not normalized (norm {norm})")]
    NotNormalized { norm: f64 },

    #[error("basis is not orthonormal (residual {residual:e})")]
    NotOrthonormal { residual: f64 },

    #[error("invalid density operator: {0}")]
    InvalidDensity(String),

    #[error("basis operators violate the column orthogonality relation (residual {residual:e})")]
    OrthogonalityViolation { residual: f64 },

    #[error("channel is not trace preserving (residual {residual:e})")]
    NotTracePreserving { residual: f64 },

    #[error("channel has no unique fixed point (null space dimension {dimension})")]
    NoUniqueFixedPoint { dimension: usize },

    #[error("parameter out of range: {0}")]
    OutOfRange(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("no contradiction obtainable: witness count {witness} must exceed ambient dimension {ambient}")]
    NoContradiction { witness: usize, ambient: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
