//! Error type shared by the whole pipeline.
//!
//! The four variants map one-to-one onto the CLI exit codes 2..5.

use thiserror::Error;

/// Failure modes of the solver.
#[derive(Debug, Error)]
pub enum Error {
    /// Malformed input data (function files, JSON payloads).
    #[error("parse error: {0}")]
    Parse(String),
    /// A named parameter constraint was violated.
    #[error("parameter error: {0}")]
    Parameter(String),
    /// An internal invariant failed; indicates a bug, not bad input.
    #[error("invariant violation: {0}")]
    Invariant(String),
    /// The request exceeds the configured resource limits.
    #[error("resource limit: {0}")]
    Resource(String),
}

impl Error {
    /// Process exit code associated with this error class.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse(_) => 2,
            Error::Parameter(_) => 3,
            Error::Invariant(_) => 4,
            Error::Resource(_) => 5,
        }
    }
}
