//! Error types shared across the crate.

use thiserror::Error;

/// Errors produced by the numerical routines.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// Two vectors or grids that must agree in length do not.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// An operation received an empty vector where n >= 1 is required.
    #[error("empty input: {0}")]
    Empty(&'static str),

    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A quadrature or special-function evaluation could not reach the
    /// requested tolerance within its refinement budget.
    #[error("accuracy error in {context}: requested {requested:e}, achieved {achieved:e}")]
    Accuracy {
        context: String,
        requested: f64,
        achieved: f64,
    },

    /// A vector failed the ordered-probability-vector (weight) invariants.
    #[error("invalid weight vector: {0}")]
    Weights(String),

    /// A caller violated an operation's stated precondition.
    #[error("precondition violated: {0}")]
    Precondition(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
