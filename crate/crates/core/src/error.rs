//! Error types shared across the crate.

use num_complex::Complex64;
use thiserror::Error;

/// Errors produced by simulation, decomposition, retrieval, and solver routines.
#[derive(Debug, Error)]
pub enum Error {
    /// A caller-supplied argument is outside the operation's domain.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The requested truncation cannot hold the distribution to the required
    /// tail mass.
    #[error("truncation too aggressive: {0}")]
    Truncation(String),

    /// Sampled data are internally inconsistent with the operation's model
    /// (e.g. characteristic-function samples whose inverse transform has a
    /// large imaginary part).
    #[error("inconsistent input: {0}")]
    InconsistentInput(String),

    /// A sampling grid is too coarse or misaligned for the requested
    /// operation, so the result would be aliased.
    #[error("aliasing: {0}")]
    Aliasing(String),

    /// Adaptive quadrature stopped before reaching the requested accuracy.
    /// Carries the best estimate and the achieved error bound.
    #[error("quadrature accuracy not reached: achieved {achieved:.3e}, requested {requested:.3e}")]
    AccuracyNotReached {
        estimate: Complex64,
        achieved: f64,
        requested: f64,
    },

    /// A retrieval frequency falls outside the measured spectral band.
    #[error("spectral coverage: {0}")]
    Coverage(String),

    /// The dense linear solve failed or its residual is unacceptable.
    #[error("solver: {message} (condition estimate {condition_estimate:.3e})")]
    Solver {
        message: String,
        condition_estimate: f64,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
