use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed image header: field `{field}`: {detail}")]
    Format { field: &'static str, detail: String },

    #[error("truncated image payload: header declares {expected} bytes, file carries {found}")]
    Truncated { expected: usize, found: usize },

    #[error("dimension error: {0}")]
    Dimension(String),

    #[error("resolution error: correlation length {correlation_length} m is below pixel pitch {pitch} m")]
    Resolution { correlation_length: f64, pitch: f64 },

    #[error("range error: {0}")]
    Range(String),

    #[error("input error: {0}")]
    Input(String),

    #[error("sub-region selection failed: {succeeded} of {requested} windows placed before redraw budget ran out")]
    Selection { succeeded: usize, requested: usize },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("numerical failure: non-finite iterate at iteration {iteration}")]
    Numerical { iteration: usize },

    #[error("configuration error: `{field}`: {detail}")]
    Config { field: String, detail: String },

    #[error("stage `{stage}` failed: {source}")]
    Stage {
        stage: &'static str,
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

    pub(crate) fn config(field: impl Into<String>, detail: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            detail: detail.into(),
        }
    }

    pub(crate) fn in_stage(self, stage: &'static str) -> Self {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }

    /// Process exit code for this error class.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config { .. } => 2,
            Error::Io { .. } => 3,
            Error::Format { .. } | Error::Truncated { .. } => 4,
            Error::Dimension(_) | Error::Resolution { .. } | Error::Range(_) => 5,
            Error::Input(_) | Error::Degenerate(_) => 6,
            Error::Selection { .. } => 7,
            Error::Numerical { .. } => 8,
            Error::Stage { source, .. } => source.exit_code(),
        }
    }
}
