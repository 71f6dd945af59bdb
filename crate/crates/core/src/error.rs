use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("advantage matrix must be square with n >= 2 (got {rows} rows)")]
    BadShape { rows: usize },

    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("state is not on the simplex: {0}")]
    OffSimplex(String),

    #[error("advantage matrix is improper: a[{i}][{j}] = {value} (all off-diagonal entries must be > 0)")]
    Improper { i: usize, j: usize, value: f64 },

    #[error("region measure sums to {sum}, expected 1")]
    RegionSum { sum: f64 },

    #[error("invalid region key `{0}`")]
    RegionKey(String),

    #[error("index {index} out of range for {len} options")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("empty grid")]
    EmptyGrid,

    #[error("invalid toy grammar space: {0}")]
    InvalidGrammarSpace(String),

    #[error("advantage matrix failed validation: {0}")]
    InvalidMatrix(String),

    #[error("matrix file: {0}")]
    MatrixFile(String),

    #[error("invalid run configuration: {0}")]
    Config(String),
}

impl Error {
    pub(crate) fn param(name: &'static str, value: f64, reason: &'static str) -> Self {
        Error::InvalidParameter {
            name,
            value,
            reason,
        }
    }
}
