use thiserror::Error;

/// Errors raised by the SRGG library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("unsupported dimension {0} (supported: 1, 2, 3)")]
    UnsupportedDimension(usize),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("quadrature did not converge: estimate {estimate:e}, residual {residual:e}")]
    Quadrature { estimate: f64, residual: f64 },

    #[error("divergent integral: {0}")]
    Divergent(String),

    #[error("size error: {0}")]
    Size(String),

    #[error("impossible realization: pair ({i}, {j}) has {reason}")]
    ImpossibleRealization { i: usize, j: usize, reason: &'static str },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    /// True for numeric failures (quadrature, divergence, probability-zero
    /// realizations).
    pub fn is_numeric(&self) -> bool {
        matches!(
            self,
            Error::Quadrature { .. } | Error::Divergent(_) | Error::ImpossibleRealization { .. }
        )
    }
}
