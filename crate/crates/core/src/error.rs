use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid instance: {0}")]
    Invalid(String),
    #[error("invalid parameters: {0}")]
    Params(String),
    #[error("line {line}: field `{field}`: {msg}")]
    Format { line: usize, field: String, msg: String },
    #[error("{what} {value} exceeds cap {cap}")]
    CapExceeded { what: &'static str, value: u128, cap: u128 },
    #[error("generator gave up after {0} attempts")]
    PlantFailed(usize),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::Invalid(msg.into())
}

pub(crate) fn params(msg: impl Into<String>) -> Error {
    Error::Params(msg.into())
}
