//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by simulation, plan generation, and estimation.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A parameter is outside its documented range.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Operands have incompatible dimensions (qubit counts, grid shapes, ...).
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// A record grid is missing cells; lists the absent (j, k, m) triples.
    #[error("incomplete record grid; missing (j, k, m) cells: {0:?}")]
    MissingCells(Vec<(usize, usize, usize)>),

    /// An iterative fit failed to converge or was handed unusable data.
    #[error("fit failed: {0}")]
    FitFailed(String),

    /// Too many bootstrap refits failed to trust the resampled distribution.
    #[error("bootstrap unstable: {failed} of {total} refits failed")]
    BootstrapUnstable { failed: usize, total: usize },

    /// Not enough data for the requested statistic.
    #[error("insufficient data: {0}")]
    InsufficientData(String),
}

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
