//! Error type shared by every module.

use thiserror::Error;

/// Errors raised by the numerical pipeline.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// A configuration value is malformed or inadmissible.
    #[error("configuration error: {0}")]
    Config(String),
    /// An input violates an operation's precondition.
    #[error("precondition violated: {0}")]
    Precondition(String),
    /// An iterative method failed; `trace` carries the last residuals.
    #[error("numerical failure: {message}")]
    Numerical { message: String, trace: Vec<f64> },
    /// A computed quantity failed its accuracy monitor.
    #[error("accuracy error: {0}")]
    Accuracy(String),
    /// Working precision too small for the requested computation.
    #[error("insufficient precision: at least {required_bits} mantissa bits required")]
    InsufficientPrecision { required_bits: u32 },
    /// The first equilibrium measure is not supported on a single interval.
    #[error("multi-cut support detected: {0}")]
    MultiCut(String),
    /// Evaluation point too close to a branch point of the spectral curve.
    #[error("branch point: {0}")]
    BranchPoint(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn numerical(message: impl Into<String>, trace: Vec<f64>) -> Self {
        Error::Numerical { message: message.into(), trace }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
