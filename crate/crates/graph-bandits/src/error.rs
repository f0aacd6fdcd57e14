//! Crate-wide error type.
//!
//! All fallible operations return [`Result`]. Variants are grouped by
//! failure class rather than by module so callers can match on the kind of
//! problem (bad input, resource limit, solver breakdown, protocol misuse,
//! bad configuration, I/O) without caring which subsystem raised it.

use std::path::PathBuf;

/// Convenience alias used throughout the crate.
pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Unified error type for the crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// An argument violated a documented precondition.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// An exact computation was requested beyond its tractable size cap.
    #[error("capacity exceeded: {what} requires k <= {cap}, got k = {k}")]
    CapacityExceeded {
        /// Which computation hit its cap.
        what: &'static str,
        /// Problem size that was requested.
        k: usize,
        /// Hard cap for the exact path.
        cap: usize,
    },

    /// A numeric solver failed to converge or produced an inconsistent
    /// solution. Carries enough detail to reproduce.
    #[error("solver failure: {0}")]
    SolverFailure(String),

    /// The act/update/emit protocol was driven out of order or fed
    /// feedback inconsistent with the disclosed graph.
    #[error("protocol violation: {0}")]
    ProtocolViolation(String),

    /// An experiment configuration is internally inconsistent.
    #[error("configuration error: {0}")]
    Configuration(String),

    /// A replay source ran out of recorded rounds.
    #[error("end of stream: round {round} requested but only {available} rounds available")]
    EndOfStream {
        /// Round that was requested.
        round: u64,
        /// Number of rounds the source holds.
        available: u64,
    },

    /// Malformed text input (graph files, replay files, CSV).
    #[error("parse error at line {line}: {message}")]
    Parse {
        /// 1-based line number in the input.
        line: usize,
        /// What went wrong.
        message: String,
    },

    /// Filesystem failure, with the path that caused it.
    #[error("io error on {path}: {source}")]
    Io {
        /// Path involved in the failed operation.
        path: PathBuf,
        /// Underlying OS error.
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// Shorthand for [`Error::InvalidParameter`].
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    /// Shorthand for [`Error::ProtocolViolation`].
    pub fn protocol(msg: impl Into<String>) -> Self {
        Error::ProtocolViolation(msg.into())
    }

    /// Shorthand for [`Error::Configuration`].
    pub fn config(msg: impl Into<String>) -> Self {
        Error::Configuration(msg.into())
    }
}
