use thiserror::Error;

/// Errors raised by the solver library.
#[derive(Debug, Error)]
pub enum SfpError {
    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    Dimension {
        context: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("infeasible cut: {0}")]
    InfeasibleCut(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl SfpError {
    pub(crate) fn dim(context: &'static str, expected: usize, found: usize) -> Self {
        SfpError::Dimension {
            context,
            expected,
            found,
        }
    }

    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        SfpError::Parse {
            line,
            msg: msg.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, SfpError>;
