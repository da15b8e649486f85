//! Error type shared across the library.

use thiserror::Error;

/// Library-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// Grid construction rejected (too few nodes, empty interval, ...).
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    /// A scalar or structural parameter violates its documented range.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Two containers that must agree in length do not.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// A target node lies outside the source node range of an interpolation.
    #[error("extrapolation rejected: {0}")]
    Extrapolation(String),

    /// The regularized normal system lost positive definiteness; the
    /// regularization weight is too small for the current linearization.
    #[error("ill-conditioned normal system at alpha = {alpha:e}: {detail}")]
    IllConditioned { alpha: f64, detail: String },

    /// Iterative solver could not produce a usable iterate.
    #[error("solver failure: {0}")]
    Solver(String),

    /// Underlying file-system failure.
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    /// Malformed CSV content.
    #[error("csv error: {0}")]
    Csv(String),

    /// Malformed JSON content.
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

/// Convenience alias used by every fallible operation in this crate.
pub type Result<T> = std::result::Result<T, Error>;
