//! Error type shared across the library.

use thiserror::Error;

/// Errors raised by model construction, integration, and the CLI harness.
#[derive(Debug, Error)]
pub enum Error {
    /// A vector or matrix had the wrong length for the model.
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// Exhaustive enumeration was requested beyond the configured bound.
    #[error("capacity exceeded: {0}")]
    Capacity(String),

    /// An operation only defined for the reference topology was called on
    /// something else.
    #[error("unsupported topology: {0}")]
    UnsupportedTopology(String),

    /// An input file or run spec failed validation.
    #[error("invalid spec: {0}")]
    Spec(String),

    /// A numerical contract was violated (negative probability, norm drift,
    /// positivity loss, ...).
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// Ground-space statistics were requested for a model without an
    /// isolated ground state.
    #[error("no isolated ground state: {0}")]
    UndefinedIsolated(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
