use thiserror::Error;

/// Errors raised by the tailbound library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("argument out of domain: {0}")]
    Domain(String),

    #[error("distribution has infinite mean (alpha = {alpha})")]
    InfiniteMean { alpha: f64 },

    #[error("moment of order {k} is infinite (alpha = {alpha})")]
    InfiniteMoment { k: u32, alpha: f64 },

    #[error("empty sample")]
    EmptySample,

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("optimizer did not converge: {0}")]
    NonConvergence(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
