use thiserror::Error;

/// Errors produced by corpus construction, index I/O, and query execution.
#[derive(Debug, Error)]
pub enum SealError {
    #[error("invalid region: xmin {xmin} > xmax {xmax} or ymin {ymin} > ymax {ymax}")]
    InvalidRegion {
        xmin: f64,
        ymin: f64,
        xmax: f64,
        ymax: f64,
    },

    #[error("unknown object id {0}")]
    UnknownObject(u64),

    #[error("duplicate object id {0}")]
    DuplicateObject(u64),

    #[error("signature kind mismatch: expected {expected}, got {found}")]
    KindMismatch {
        expected: &'static str,
        found: &'static str,
    },

    #[error("index kind mismatch: method {method} requires a {expected} index, file holds {found}")]
    IndexMismatch {
        method: &'static str,
        expected: &'static str,
        found: &'static str,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },

    #[error("bad magic: not an index file")]
    BadMagic,

    #[error("unsupported index format version {0}")]
    BadVersion(u16),

    #[error("truncated or corrupt index file: {0}")]
    Truncated(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, SealError>;
