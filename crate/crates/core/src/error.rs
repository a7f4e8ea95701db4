use thiserror::Error;

/// Failures raised by the criteria engine and its supporting modules.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid system: {0}")]
    InvalidSystem(String),

    #[error("invalid measure: {0}")]
    InvalidMeasure(String),

    #[error("{criterion}: hypothesis violated ({reason})")]
    Hypothesis { criterion: &'static str, reason: String },

    #[error("singular kernel: {0}")]
    Singular(String),

    #[error("the (Delta_2) doubling condition fails: {0}")]
    Delta2(String),

    #[error("config error at `{path}`: {message}")]
    Config { path: String, message: String },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("no characterization known: {0}")]
    NoCharacterization(String),
}

impl Error {
    pub(crate) fn hypothesis(criterion: &'static str, reason: impl Into<String>) -> Self {
        Error::Hypothesis {
            criterion,
            reason: reason.into(),
        }
    }

    pub(crate) fn config(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            path: path.into(),
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
