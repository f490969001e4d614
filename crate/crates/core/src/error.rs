//! Crate-wide error type.
//!
//! Variants follow the failure categories surfaced by the CLI: parameter
//! validation, scheme configuration, capacity accounting, file format,
//! numeric precision, and metadata integrity. Each maps to a distinct
//! process exit code in the `lwmark` binary.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument violates an operation precondition (dimension mismatch,
    /// non-positive scale, index out of range, ...).
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A scheme configuration is infeasible (scaling factor outside its
    /// bounds, unsupported lattice/nesting combination, ...).
    #[error("invalid configuration: {0}")]
    Config(String),

    /// Requested payload or table size exceeds what the configuration can
    /// carry.
    #[error("capacity exceeded: requested {requested} bits, capacity {capacity} bits")]
    Capacity { requested: u64, capacity: u64 },

    /// Malformed or unsupported input file.
    #[error("format error at byte {offset}: {message}")]
    Format { offset: u64, message: String },

    /// An operation would silently lose numeric precision (e.g. writing
    /// non-integer samples as PCM16).
    #[error("precision error: {0}")]
    Precision(String),

    /// Sidecar metadata does not match the file it describes.
    #[error("integrity error: {0}")]
    Integrity(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub(crate) fn format(offset: u64, msg: impl Into<String>) -> Self {
        Error::Format {
            offset,
            message: msg.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
