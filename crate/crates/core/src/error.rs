use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("scheme {0} has no linear symbol mapping")]
    UnsupportedScheme(String),

    #[error("length mismatch: {0}")]
    Length(String),

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("signal too short: {len} samples, window needs {window}")]
    TooShort { len: usize, window: usize },

    #[error("overlap {overlap} must be smaller than window {window}")]
    Overlap { overlap: usize, window: usize },

    #[error("cannot stratify into {k} folds: smallest cell has {smallest} entries")]
    Stratification { k: usize, smallest: usize },

    #[error("integrity check failed for {path}: {reason}")]
    Integrity { path: PathBuf, reason: String },

    #[error("format error in {path}: {reason}")]
    Format { path: PathBuf, reason: String },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("training diverged at iteration {iteration}: loss = {loss}")]
    Diverged { iteration: usize, loss: f64 },

    #[error("dataset build aborted after writing {written} of {total} images: {source}")]
    Build {
        written: usize,
        total: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("image error: {0}")]
    Image(#[from] image::ImageError),

    #[error("serialization error: {0}")]
    Serde(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }
}
