use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("view {view} has {found} columns, expected {expected}")]
    MismatchedColumns {
        view: usize,
        expected: usize,
        found: usize,
    },

    #[error("non-finite value in {0}")]
    NonFinite(String),

    #[error("invalid labels: {0}")]
    BadLabels(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("singular value decomposition did not converge")]
    SvdFailure,

    #[error("eigendecomposition did not converge")]
    EigenFailure,

    #[error("linear system is not positive definite (check penalty parameters)")]
    SingularSystem,

    #[error("centroid weights are all zero")]
    AllZeroLambda,

    #[error("cannot form {k} clusters from {n} points")]
    BadK { k: usize, n: usize },

    #[error("label vectors differ in length ({0} vs {1})")]
    LengthMismatch(usize, usize),

    #[error("degenerate data: {0}")]
    DegenerateData(String),

    #[error("{}:{line}: {message}", path.display())]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
