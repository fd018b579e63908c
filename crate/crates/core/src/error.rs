use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// An operator was handed to a routine whose contract it does not meet,
    /// e.g. an asymmetric operator given to the Lanczos solver.
    #[error("contract violation: {0}")]
    ContractViolation(String),

    #[error("no convergence after {iterations} iterations (worst residual {worst:.3e})")]
    Convergence {
        iterations: usize,
        worst: f64,
        /// Best residual norm reached for each requested pair.
        residuals: Vec<f64>,
    },

    #[error("degenerate normalization at index {index}: degree {value:.3e}")]
    DegenerateNormalization { index: usize, value: f64 },

    #[error("format error in {path}: {msg}", path = .path.display())]
    Format { path: PathBuf, msg: String },

    #[error("I/O error on {path}: {source}", path = .path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{context}: {source}")]
    Context {
        context: String,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn format(path: impl Into<PathBuf>, msg: impl Into<String>) -> Self {
        Error::Format {
            path: path.into(),
            msg: msg.into(),
        }
    }

    /// Wraps the error with a short description of what was being attempted.
    pub fn context(self, context: impl Into<String>) -> Self {
        Error::Context {
            context: context.into(),
            source: Box::new(self),
        }
    }
}
