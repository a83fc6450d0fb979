use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("internal invariant violated: {0}")]
    Invariant(String),
    #[error("parse error at {line}:{column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("unsupported level {0}: cusp enumeration needs N >= 5")]
    UnsupportedLevel(i64),
    #[error("not a modular function: {0}")]
    NotModular(String),
    #[error("normalization failed: {0}")]
    Normalization(String),
    #[error("pairing error: residues {0} and {1} carry incompatible signs")]
    Pairing(i64, i64),
    #[error("zero theta factor: {0}")]
    ZeroTheta(String),
    #[error("stale certificate: statement hash {found} does not match {expected}")]
    StaleCertificate { expected: String, found: String },
    #[error("parameter out of range: {0}")]
    Parameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
