use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid raster: {0}")]
    InvalidRaster(String),

    #[error("malformed image stream at byte offset {offset}: {reason}")]
    Decode { offset: usize, reason: String },

    #[error("unsupported image format: {0}")]
    UnsupportedFormat(String),

    #[error("image encode failed: {0}")]
    Encode(String),

    #[error("dimension mismatch: {left:?} vs {right:?}")]
    DimensionMismatch { left: (usize, usize, usize), right: (usize, usize, usize) },

    #[error("placement error: {0}")]
    Placement(String),

    #[error("invalid parameter for {kind}: {field}: {reason}")]
    Param { kind: String, field: String, reason: String },

    #[error("configuration error: {0}")]
    Config(String),

    /// Malformed JSON document; `offset` is a byte offset into the source text.
    #[error("malformed JSON at byte offset {offset} (line {line}, column {column}): {reason}")]
    Json { offset: usize, line: usize, column: usize, reason: String },

    /// Structurally valid JSON that violates the pipeline schema.
    #[error("spec error at {pointer}: {reason}")]
    Spec { pointer: String, reason: String },

    #[error("unknown effect kind {0:?}")]
    UnknownKind(String),

    /// An effect failed while the pipeline was running.
    #[error("{phase} phase, node {index} ({kind}): {source}")]
    Effect {
        phase: String,
        index: usize,
        kind: String,
        #[source]
        source: Box<Error>,
    },

    #[error("external transform {label:?} failed: {reason}")]
    External { label: String, reason: String },

    #[error("texture directory {path}: {reason}")]
    Texture { path: PathBuf, reason: String },

    /// A caller-supplied sample buffer with the wrong layout.
    #[error("buffer type error: {0}")]
    Buffer(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn param(kind: &str, field: &str, reason: impl Into<String>) -> Self {
        Error::Param { kind: kind.to_string(), field: field.to_string(), reason: reason.into() }
    }

    /// True for errors caused by user configuration rather than data or I/O.
    pub fn is_config(&self) -> bool {
        match self {
            Error::Param { .. }
            | Error::Config(_)
            | Error::Json { .. }
            | Error::Spec { .. }
            | Error::UnknownKind(_)
            | Error::Texture { .. } => true,
            Error::Effect { source, .. } => source.is_config(),
            _ => false,
        }
    }
}
