use thiserror::Error;

/// Errors produced by the library.
///
/// The variants map one-to-one onto the CLI exit codes: invariant failures
/// exit with 1, input errors with 2 and resource caps with 3.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Input(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("did not converge after {iterations} iterations (best value {best_value:.3e}): {reason}")]
    Convergence {
        iterations: usize,
        best_value: f64,
        best_point: Vec<f64>,
        reason: String,
    },

    #[error("resource cap exceeded: {what} needs {needed}, cap is {cap}")]
    Resource { what: String, needed: usize, cap: usize },

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("inconclusive: {0}")]
    Inconclusive(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub fn invariant(msg: impl Into<String>) -> Self {
        Error::Invariant(msg.into())
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Input(_) | Error::Dimension { .. } => 2,
            Error::Resource { .. } => 3,
            Error::Convergence { .. } | Error::Invariant(_) | Error::Numerical(_) | Error::Inconclusive(_) => 1,
        }
    }
}
