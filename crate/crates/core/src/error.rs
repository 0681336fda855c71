use std::path::PathBuf;

/// Errors produced by the detection pipeline and its supporting I/O.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A file did not match its expected on-disk format.
    #[error("format error in {path}: {reason}")]
    Format { path: PathBuf, reason: String },

    /// Input values violate a data contract (non-finite, sentinel, ...).
    #[error("data error: {0}")]
    Data(String),

    /// An argument violates an operation's precondition.
    #[error("argument error: {0}")]
    Argument(String),

    /// An operation was invoked in an invalid state.
    #[error("state error: {0}")]
    State(String),

    /// A configuration file or value could not be accepted.
    #[error("configuration error: {0}")]
    Config(String),

    /// Evaluation preconditions (positives/negatives present) not met.
    #[error("evaluation error: {0}")]
    Evaluation(String),

    #[error("I/O error on {path}: {source}")]
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

    pub(crate) fn format(path: impl Into<PathBuf>, reason: impl Into<String>) -> Self {
        Error::Format {
            path: path.into(),
            reason: reason.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
