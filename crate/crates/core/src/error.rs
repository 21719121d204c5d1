use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// The oracle produced NaN or an infinite value during a run.
    #[error("non-finite value at iteration {index}")]
    NonFinite { index: usize },

    /// A diagnostic that needs every iterate was given a thinned trajectory.
    #[error("trajectory is thinned (stride {stride}); {what} needs a dense trajectory")]
    Thinned { stride: usize, what: &'static str },

    #[error("malformed trajectory data: {0}")]
    Parse(String),

    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
