use thiserror::Error;

/// Errors raised by the numerical routines. Every variant names the module
/// that rejected the input so batch front-ends can report provenance.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("[{module}] domain error: {msg}")]
    Domain { module: &'static str, msg: String },

    #[error("[{module}] capacity exceeded: {msg}")]
    Capacity { module: &'static str, msg: String },

    #[error("[{module}] invalid state: {msg}")]
    InvalidState { module: &'static str, msg: String },

    #[error("[{module}] outside model validity: {msg}")]
    OutOfModel { module: &'static str, msg: String },
}

impl Error {
    pub(crate) fn domain(module: &'static str, msg: impl Into<String>) -> Self {
        Error::Domain { module, msg: msg.into() }
    }

    pub(crate) fn capacity(module: &'static str, msg: impl Into<String>) -> Self {
        Error::Capacity { module, msg: msg.into() }
    }

    pub(crate) fn invalid_state(module: &'static str, msg: impl Into<String>) -> Self {
        Error::InvalidState { module, msg: msg.into() }
    }

    pub(crate) fn out_of_model(module: &'static str, msg: impl Into<String>) -> Self {
        Error::OutOfModel { module, msg: msg.into() }
    }

    pub fn module(&self) -> &'static str {
        match self {
            Error::Domain { module, .. }
            | Error::Capacity { module, .. }
            | Error::InvalidState { module, .. }
            | Error::OutOfModel { module, .. } => module,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
