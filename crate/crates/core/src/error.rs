use thiserror::Error;

/// Errors raised by ring arithmetic.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArithError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("not a unit: {0}")]
    NotUnit(String),
    #[error("not divisible: {0}")]
    NotDivisible(String),
    #[error("division by zero: {0}")]
    DivisionByZero(String),
}

/// Top-level error type shared by every pipeline stage.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("precision exhausted: {0}")]
    Precision(String),
    #[error("capability limit: {0}")]
    Capability(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("verification mismatch: {0}")]
    Mismatch(String),
}

impl Error {
    /// Process exit code associated with the error class.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse(_) | Error::Invalid(_) => 2,
            Error::Precision(_) => 3,
            Error::Capability(_) => 4,
            Error::Mismatch(_) => 5,
            Error::Arith(ArithError::Config(_)) => 2,
            Error::Arith(_) | Error::Domain(_) => 3,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
