//! Error type shared across the library.

use thiserror::Error;

/// Errors surfaced by parsing, evaluation and asymptotic routines.
#[derive(Debug, Error)]
pub enum Error {
    /// Malformed graph or coloring text.
    #[error("parse: {0}")]
    Parse(String),
    /// A configured budget (states, configurations, curves, precision)
    /// would be exceeded.
    #[error("capacity: {0}")]
    Capacity(String),
    /// The input is degenerate for the requested operation.
    #[error("degenerate: {0}")]
    Degenerate(String),
    /// An unknown builtin or a missing name was requested.
    #[error("not found: {0}")]
    NotFound(String),
}

pub type Result<T> = std::result::Result<T, Error>;
