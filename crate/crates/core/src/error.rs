use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("zeta has a pole at s = 1")]
    Pole,

    #[error("range error: {0}")]
    Range(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("root finder failed: {0}")]
    RootFinder(String),

    #[error("quadrature tolerance not met after max depth: value {value:e}, error estimate {estimate:e}")]
    ToleranceNotMet { value: f64, estimate: f64 },

    #[error("failed to parse {path}: line {line}: {msg}")]
    Parse { path: PathBuf, line: usize, msg: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }
}
