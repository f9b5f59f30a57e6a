//! Error types shared across the crate.

/// Unified error type for all fallible operations in this crate.
#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    /// Invalid argument: shape mismatches, out-of-range parameters, non-finite data.
    #[error("input error: {0}")]
    Input(String),

    /// A computation broke down numerically (e.g. a quadratic form that should be
    /// non-negative came out significantly negative).
    #[error("numerical error: {0}")]
    Numerical(String),

    /// A covariance matrix failed to factor even after the jitter ladder; carries
    /// the estimated smallest eigenvalue.
    #[error("spectrum error: matrix not positive definite (smallest eigenvalue ~ {smallest_eigenvalue:e})")]
    Spectrum { smallest_eigenvalue: f64 },

    /// A Krylov basis was requested past its numerical rank.
    #[error("rank error: {0}")]
    Rank(String),

    /// An experiment configuration failed validation.
    #[error("config error: {0}")]
    Config(String),

    /// An evaluator handed to the quadrature produced a non-finite value.
    #[error("evaluation error: {0}")]
    Evaluation(String),

    /// A degenerate series (e.g. constant input to the empirical ACF).
    #[error("degenerate input: {0}")]
    Degenerate(String),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
