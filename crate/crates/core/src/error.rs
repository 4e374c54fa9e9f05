use std::path::PathBuf;

use thiserror::Error;

/// Errors shared across the simulator, solver, optimizer and driver.
#[derive(Debug, Error)]
pub enum Error {
    /// A requested configuration is outside what this build supports
    /// (register too wide, invalid run parameters, malformed config file).
    #[error("configuration error: {0}")]
    Config(String),

    /// An API was called with inconsistent arguments (index out of range,
    /// size mismatch, wrong parameter count).
    #[error("usage error: {0}")]
    Usage(String),

    /// The operation is mathematically undefined for the given inputs.
    #[error("domain error: {0}")]
    Domain(String),

    /// User-supplied numerical input was unusable (non-finite cost, ...).
    #[error("input error: {0}")]
    Input(String),

    /// File I/O failure, annotated with the path involved.
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// JSON (de)serialization failure, annotated with the path involved.
    #[error("json error on {path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },

    /// CSV serialization failure, annotated with the path involved.
    #[error("csv error on {path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
