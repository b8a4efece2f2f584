use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("invalid regularization: {0}")]
    InvalidRegularization(String),

    /// An integer ratio admits a continuum of optimal (B, S) splits, so the
    /// decomposition is not identifiable.
    #[error("lambda_b / lambda_s = {0} is an integer; the optimal (B, S) split is not unique")]
    IntegerRatio(f64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid weight {value} at index {index}; weights must be strictly positive")]
    NonPositiveWeight { index: usize, value: f64 },

    #[error("logarithm argument {0} must exceed 1")]
    LogArgument(f64),

    #[error("restricted Gram matrix is singular")]
    SingularGram,

    #[error("empty regularization grid")]
    EmptyGrid,

    #[error("missing data file {0}")]
    MissingFile(PathBuf),

    #[error("{path}: expected {expected} rows, found {found}")]
    RowCount {
        path: PathBuf,
        expected: usize,
        found: usize,
    },

    #[error("{path}:{line}: cannot parse token {token:?}")]
    Parse {
        path: PathBuf,
        line: usize,
        token: String,
    },

    #[error("{path}:{line}: expected {expected} columns, found {found}")]
    ColumnCount {
        path: PathBuf,
        line: usize,
        expected: usize,
        found: usize,
    },

    #[error("dataset features have already been scaled")]
    AlreadyScaled,

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
