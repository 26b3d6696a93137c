use std::path::PathBuf;

/// Errors produced by any module in this crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid float format: {0}")]
    InvalidFormat(String),

    #[error("format is {width} bits wide, enumeration is capped at {cap} bits")]
    EnumerationCapExceeded { width: u32, cap: u32 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("alphabet size mismatch: {left} vs {right}")]
    AlphabetMismatch { left: usize, right: usize },

    #[error("oracle refuses alphabet of size {0} (max 4)")]
    OracleAlphabetTooLarge(usize),

    #[error("no files matched under {path} with suffixes {suffixes:?}")]
    NoFilesMatched { path: PathBuf, suffixes: Vec<String> },

    #[error("manifest {path}, line {line}: {message}")]
    Manifest {
        path: PathBuf,
        line: u64,
        message: String,
    },

    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}
