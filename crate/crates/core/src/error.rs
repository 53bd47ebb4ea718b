use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("shape mismatch at layer {layer}: {detail}")]
    LayerShape { layer: usize, detail: String },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("invalid soft label: {0}")]
    InvalidLabel(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("io error at {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed image header in {path}: {detail}")]
    MalformedHeader { path: PathBuf, detail: String },

    #[error("cannot parse {path}: {detail}")]
    Parse { path: PathBuf, detail: String },

    #[error("truncated image payload in {path}: expected {expected} bytes, found {found}")]
    TruncatedImage {
        path: PathBuf,
        expected: usize,
        found: usize,
    },

    #[error("unsupported bit depth in {path}: {detail}")]
    UnsupportedBitDepth { path: PathBuf, detail: String },

    #[error("bad checkpoint magic: {0:?}")]
    BadMagic([u8; 4]),

    #[error("checkpoint version mismatch: expected 1, found {0}")]
    VersionMismatch(char),

    #[error("checkpoint truncated in header")]
    TruncatedHeader,

    #[error("checkpoint truncated at tensor {0}")]
    TruncatedCheckpoint(usize),

    #[error("checkpoint does not match model spec at layer {layer}: {detail}")]
    SpecMismatch { layer: usize, detail: String },

    #[error("class {class} has {count} samples, fewer than k = {k}")]
    ClassTooSmall {
        class: &'static str,
        count: usize,
        k: usize,
    },

    #[error("training diverged at epoch {epoch}: {detail}")]
    Diverged { epoch: usize, detail: String },

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("png error: {0}")]
    Png(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
