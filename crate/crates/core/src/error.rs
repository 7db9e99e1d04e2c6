use thiserror::Error;

/// Errors raised by the numerical pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("Gram matrix is singular or ill-conditioned (condition number {condition:e} exceeds {threshold:e})")]
    GramSingular { condition: f64, threshold: f64 },

    #[error("alias structure violated: {0}")]
    AliasStructureViolated(String),

    #[error("root bracketed in [{lo}, {hi}] did not converge within {iterations} bisection steps")]
    UnresolvedRoot { lo: f64, hi: f64, iterations: usize },

    #[error("a seed is required for the uniform-random layout")]
    MissingSeed,

    #[error("I/O error on {path}: {message}")]
    Io { path: String, message: String },

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// True for failures of the numerical kernels (as opposed to bad input or I/O).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::GramSingular { .. }
                | Error::UnresolvedRoot { .. }
                | Error::AliasStructureViolated(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
