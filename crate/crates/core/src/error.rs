use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// The file decoded but is not in the expected pixel format.
    #[error("{path}: {message}")]
    Format { path: PathBuf, message: String },

    #[error("label {label} exceeds the 16-bit range")]
    LabelOverflow { label: u32 },

    /// A caller broke an operation's precondition (dimension mismatch,
    /// invalid parameters, ...).
    #[error("contract violation: {0}")]
    Contract(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("page generation failed: {0}")]
    Generation(String),

    #[error("external predictor: {0}")]
    Subprocess(String),

    #[error("predictor failed at window origin ({x}, {y}): {message}")]
    Predictor { x: i64, y: i64, message: String },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn contract(msg: impl Into<String>) -> Self {
        Error::Contract(msg.into())
    }

    /// True for errors caused by bad input values rather than the environment.
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            Error::Contract(_) | Error::LabelOverflow { .. } | Error::Degenerate(_) | Error::Generation(_)
        )
    }
}
