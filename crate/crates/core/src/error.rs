use thiserror::Error;

/// Errors raised by the matrix kernels, projections and solver.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("shape mismatch: expected {expected:?}, got {got:?}")]
    ShapeMismatch {
        expected: (usize, usize),
        got: (usize, usize),
    },

    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix needs at least as many rows as columns, got {rows}x{cols}")]
    WideMatrix { rows: usize, cols: usize },

    #[error("data length {got} does not match {rows}x{cols}")]
    InvalidData { rows: usize, cols: usize, got: usize },

    #[error("matrix dimensions must be positive, got {rows}x{cols}")]
    EmptyMatrix { rows: usize, cols: usize },

    #[error("non-finite value at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("reference matrix has zero norm")]
    ZeroDenominator,

    #[error("invalid sampling range [{lo}, {hi}]: need 0 <= lo < hi")]
    BadRange { lo: f64, hi: f64 },

    #[error("SVD did not converge within {sweeps} sweeps")]
    NoConvergence { sweeps: usize },

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("singular values must be finite, nonnegative and sorted descending")]
    BadSpectrum,

    #[error("diagonal entry {index} is negative ({value})")]
    NegativeDiagonal { index: usize, value: f64 },

    #[error("prescribed value at ({row}, {col}) is negative or not finite ({value})")]
    NegativeValue { row: usize, col: usize, value: f64 },

    #[error("no nonnegative 2x2 matrix has these singular values and diagonal")]
    InfeasibleInput,

    #[error("invalid multiplicities: {0}")]
    BadMultiplicities(String),

    #[error("index ({row}, {col}) out of bounds for {rows}x{cols}")]
    IndexOutOfBounds {
        row: usize,
        col: usize,
        rows: usize,
        cols: usize,
    },

    #[error("index ({row}, {col}) is prescribed more than once")]
    DuplicateIndex { row: usize, col: usize },

    #[error("prescribed entries ({row}, {col}) and ({col}, {row}) disagree under symmetry")]
    AsymmetricConstraint { row: usize, col: usize },

    #[error("report carries no distance trace")]
    NoTrace,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;
