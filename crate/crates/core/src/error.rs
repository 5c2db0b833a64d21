use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain where the quantity is defined.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Circulant embedding produced eigenvalues below the admissible tolerance
    /// and the dense fallback could not factor the covariance either.
    #[error("covariance embedding failed: {0}")]
    Embedding(String),

    #[error("path {path} became non-finite at t = {time}")]
    PathBlowup { path: usize, time: f64 },

    #[error("solution became non-finite at t = {time}")]
    NonFinite { time: f64 },

    #[error("time step {dt} exceeds the stability bound {limit} at t = {time}; use a smaller dt")]
    Cfl { dt: f64, limit: f64, time: f64 },

    #[error("commutativity check failed: max residual {max_residual:e} exceeds {tol:e}")]
    NotCommutative { max_residual: f64, tol: f64 },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("config error at `{path}`: {message}")]
    Config { path: String, message: String },

    #[error("malformed ensemble file: {0}")]
    Format(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn config(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            path: path.into(),
            message: message.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
