use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("line {line}: transition time must be at least 1, got {value}")]
    InvalidTransition { line: usize, value: i128 },

    #[error("edge list contains no edges")]
    EmptyStream,

    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),

    #[error("invalid interval [{start}, {end}]: start exceeds end")]
    InvalidInterval { start: u64, end: u64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("malformed index file: {0}")]
    Format(String),

    #[error("unsupported index file version {0}")]
    UnsupportedVersion(u32),

    #[error("index checksum mismatch: stored {stored:#010x}, computed {computed:#010x}")]
    Checksum { stored: u32, computed: u32 },

    #[error("instance too large for {what}: {detail}")]
    TooLarge { what: &'static str, detail: String },

    #[error("failed to start worker pool: {0}")]
    ThreadPool(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}
