use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] linemask::Error),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// A readable file whose contents do not parse.
    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },

    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) if e.is_usage() => 2,
            CliError::Parse { .. } | CliError::Usage(_) => 2,
            _ => 1,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Core(linemask::Error::Io { .. }) | CliError::Io { .. } => "io",
            CliError::Core(linemask::Error::Format { .. }) => "format",
            CliError::Core(linemask::Error::Predictor { .. } | linemask::Error::Subprocess(_)) => "predictor",
            CliError::Core(_) | CliError::Usage(_) => "usage",
            CliError::Parse { .. } => "parse",
        }
    }

    pub fn path(&self) -> Option<&std::path::Path> {
        match self {
            CliError::Core(linemask::Error::Io { path, .. } | linemask::Error::Format { path, .. }) => Some(path),
            CliError::Io { path, .. } | CliError::Parse { path, .. } => Some(path),
            _ => None,
        }
    }
}
