//! Error type shared by every module of the crate.

use thiserror::Error;

/// Failures reported by the numerical and exact routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A p-adic computation would keep fewer significant digits than allowed.
    #[error("p-adic precision exhausted: {0}")]
    Precision(String),

    /// An iterative or adaptive procedure failed to reach the requested tolerance.
    #[error("not converged: {0}")]
    NotConverged(String),

    /// Structurally invalid input (malformed balls, empty ladders, bad parameters).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A truncation could not be certified below the requested tolerance.
    #[error("truncation bound not met: {0}")]
    Truncation(String),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
