use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Invalid arguments or configuration (bad paths, odd sample size, ...).
    #[error("config error: {0}")]
    Config(String),

    /// Problems with the data itself: malformed inputs, duplicates, degenerate rows.
    #[error("data error: {0}")]
    Data(String),

    #[error(
        "near-singular Gram matrix (lambda_min = {lambda_min:e}, floor = {floor:e}); \
             check for duplicate or near-duplicate examples, which inflate DDC through \
             eigenvectors with tiny eigenvalues"
    )]
    NearSingular { lambda_min: f64, floor: f64 },

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("representation `{representation}`, replicate {replicate}: {source}")]
    Run {
        representation: String,
        replicate: usize,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub(crate) fn data(msg: impl Into<String>) -> Self {
        Error::Data(msg.into())
    }

    /// Process exit code for the CLI: 2 config, 3 data, 4 numeric.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) => 2,
            Error::Io { .. } => 2,
            Error::Data(_) | Error::NearSingular { .. } => 3,
            Error::Numeric(_) => 4,
            Error::Run { source, .. } => source.exit_code(),
        }
    }
}
