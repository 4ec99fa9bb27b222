use thiserror::Error;

/// Errors raised by the numerical routines.
///
/// Variants fall into three families that the CLI maps onto exit codes:
/// malformed input, violated preconditions, and numerical non-convergence.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain mismatch: {0}")]
    DomainMismatch(String),

    #[error("logarithm is singular: constant term of 1 + u vanishes")]
    SingularLog,

    #[error("series has no valid expansion: {0}")]
    InvalidExpansion(String),

    #[error("exponent {0} does not produce a Laurent series for leading power {1}")]
    NonIntegralPower(String, i32),

    #[error("insufficient truncation: {0}")]
    InsufficientTruncation(String),

    #[error("series is not in class Sigma: {0}")]
    NotClassSigma(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("non-integrable quadratic differential: {0}")]
    NonIntegrable(String),

    #[error("quadrature did not reach tolerance {tol:e} (estimate {estimate:e} after {cells} cells)")]
    QuadratureBudget { tol: f64, estimate: f64, cells: usize },

    #[error("iteration did not converge after {iterations} steps (residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("KKT residuals above tolerance: {0}")]
    KktFailure(String),

    #[error("invalid input: {0}")]
    Input(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Coarse classification of an [`Error`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Input,
    Domain,
    Numerical,
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Json(_) | Error::Io(_) | Error::Input(_) => ErrorKind::Input,
            Error::QuadratureBudget { .. } | Error::NonConvergence { .. } | Error::KktFailure(_) => {
                ErrorKind::Numerical
            }
            _ => ErrorKind::Domain,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn precondition<S: Into<String>>(msg: S) -> Error {
    Error::Precondition(msg.into())
}
