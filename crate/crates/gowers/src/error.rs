//! Error type shared across the crate.

use thiserror::Error;

/// Errors produced by construction, validation, and solver routines.
#[derive(Debug, Error)]
pub enum Error {
    /// Invalid argument: bad group orders, exponents, dimensions, subsets, ...
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Two objects live on different groups (or cube dimensions) and cannot
    /// be combined.
    #[error("domain mismatch: {0}")]
    DomainMismatch(String),

    /// A computation would exceed the configured resource guard
    /// (cube dimension or enumeration size).
    #[error("resource guard: {0}")]
    ResourceGuard(String),

    /// An internal numerical consistency check failed (e.g. a quantity that
    /// must be nonnegative came out clearly negative).
    #[error("numerical consistency: {0}")]
    Numerical(String),

    /// The regularization loop exceeded its cell cap or budget.
    #[error("regularity failure: {0}")]
    RegularityFailure(String),

    /// I/O or (de)serialization failure.
    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    /// JSON (de)serialization failure.
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
