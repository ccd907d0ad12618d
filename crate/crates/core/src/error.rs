use std::io;
use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },

    #[error(transparent)]
    Stream(#[from] io::Error),

    /// A malformed line in a column file. `line` is 1-based.
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("label id {id} out of range for {num_labels} labels")]
    LabelOutOfRange { id: usize, num_labels: usize },

    #[error("sentence {sentence}: {message}")]
    ShapeMismatch { sentence: usize, message: String },

    #[error("bad magic: not a model file")]
    BadMagic,

    #[error("unsupported model format version {found} (this build reads version {supported})")]
    UnsupportedVersion { found: u32, supported: u32 },

    #[error("model file is truncated")]
    Truncated,

    #[error("model checksum mismatch")]
    ChecksumMismatch,

    #[error("corrupt model payload: {0}")]
    Corrupt(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
