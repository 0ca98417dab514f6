//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A caller broke an operation's precondition (non-Hermitian input,
    /// bad dimension, x <= 0, ...).
    #[error("contract violation: {0}")]
    Contract(String),

    #[error("dimension mismatch: {left} vs {right}")]
    DimMismatch { left: usize, right: usize },

    /// The input is valid but outside what the requested mode can do
    /// (e.g. irrational spectrum in exact mode).
    #[error("unsupported input: {0}")]
    Unsupported(String),

    /// Word enumeration would exceed the configured cap.
    #[error("enumeration cap exceeded: binom({n}+{m}, {n}) = {count} words > cap {cap}")]
    EnumerationCap {
        n: usize,
        m: usize,
        count: u128,
        cap: u128,
    },

    #[error("scale cap exceeded: {0}")]
    ScaleCap(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn contract(msg: impl Into<String>) -> Self {
        Error::Contract(msg.into())
    }

    pub fn unsupported(msg: impl Into<String>) -> Self {
        Error::Unsupported(msg.into())
    }
}
