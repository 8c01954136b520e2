use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{context}: {source}")]
    Json {
        context: String,
        #[source]
        source: serde_json::Error,
    },
    #[error("bad file format: {0}")]
    Format(String),
    #[error("usage: {0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] antiwick_core::Error),
}

pub type CliResult<T> = Result<T, CliError>;

/// Process exit status for a failed command.
pub const EXIT_FLAGGED: u8 = 1;
pub const EXIT_USAGE: u8 = 2;

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Self::Io {
            path: path.into(),
            source,
        }
    }

    pub fn json(context: impl Into<String>, source: serde_json::Error) -> Self {
        Self::Json {
            context: context.into(),
            source,
        }
    }

    /// Divergence and overflow are numerical outcomes, everything else is a
    /// usage problem.
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Core(antiwick_core::Error::Divergent(_))
            | Self::Core(antiwick_core::Error::StripOverflow { .. }) => EXIT_FLAGGED,
            _ => EXIT_USAGE,
        }
    }
}
