use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("no root: {0}")]
    NoRoot(String),
    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),
    #[error("enumeration budget exceeded: {0}")]
    Budget(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("mode error: {0}")]
    Mode(String),
}

pub type Result<T> = std::result::Result<T, Error>;
