use std::io;
use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed input text. `column` is 1-based and absent when the
    /// problem concerns the whole line.
    #[error("{source_name}:{line}{}: {message}", column.map(|c| format!(":{c}")).unwrap_or_default())]
    Parse {
        source_name: String,
        line: usize,
        column: Option<usize>,
        message: String,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid token: {0}")]
    InvalidToken(String),

    #[error("invalid span: {0}")]
    InvalidSpan(String),

    /// Two corpora that should describe the same text do not.
    #[error("corpora are not aligned: {0}")]
    Misaligned(String),

    #[error("tag {0:?} has no class in the tagset map")]
    UnclassifiedTag(String),

    /// I/O failure on a named file.
    #[error("{}: {source}", path.display())]
    File {
        path: PathBuf,
        #[source]
        source: io::Error,
    },

    #[error(transparent)]
    Io(#[from] io::Error),
}

impl Error {
    pub(crate) fn parse(
        source_name: &str,
        line: usize,
        column: Option<usize>,
        message: impl Into<String>,
    ) -> Self {
        Error::Parse {
            source_name: source_name.to_string(),
            line,
            column,
            message: message.into(),
        }
    }
}
