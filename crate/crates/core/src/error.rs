//! Error types shared across the crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// An iterative method failed to converge.
    #[error("convergence failure: {0}")]
    Convergence(String),

    /// A Jacobian or linear system was singular where it must not be.
    #[error("singularity: {0}")]
    Singular(String),

    /// A descriptor violated a structural constraint at construction time.
    #[error("invalid configuration: {0}")]
    Config(String),

    /// An ODE integration exceeded its drift tolerance or left its domain.
    #[error("integration failure: {0}")]
    Integration(String),

    /// A vector potential does not fit the linear homogeneous-field form.
    #[error("not separable in this framework: {0}")]
    NotSeparable(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("scenario schema error: {0}")]
    Schema(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Schema(e.to_string())
    }
}
