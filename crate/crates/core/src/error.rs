use thiserror::Error;

/// Errors raised while reading corpora, model files and configuration.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("model file line {line}: {message}")]
    Model { line: usize, message: String },

    #[error("training: {0}")]
    Training(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("turn id mismatch: gold has {gold:?}, predictions have {predicted:?}")]
    TurnMismatch { gold: String, predicted: String },
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }

    pub(crate) fn model(line: usize, message: impl Into<String>) -> Self {
        Error::Model {
            line,
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
