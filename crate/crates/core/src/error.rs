//! Error type shared by every module of the crate.

use std::path::PathBuf;

/// Result alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// An argument lies outside the domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Invalid parameters, schedules, grids or run configurations.
    #[error("configuration error: {0}")]
    Config(String),

    /// Both coupling components vanish, so the ratios are undefined.
    #[error("degenerate drive: both coupling Rabi frequencies are zero")]
    DegenerateDrive,

    /// The closed-form solution does not cover the requested schedule.
    #[error("closed form unavailable: {0}")]
    UnsupportedOracle(String),

    /// A solver produced a non-finite value.
    #[error("numeric blow-up at step {step}: {detail}")]
    NumericBlowup { step: usize, detail: String },

    /// Malformed configuration text.
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    /// Two run directories cannot be compared.
    #[error("comparison error: {0}")]
    Compare(String),

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

    /// Process exit code for the command line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::NumericBlowup { .. } => 3,
            Error::Io { .. } => 4,
            _ => 2,
        }
    }
}
