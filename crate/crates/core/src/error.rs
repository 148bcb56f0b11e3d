use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("parse error at position {position}: {message}")]
    Parse { position: usize, message: String },
    #[error("count overflows 64 bits")]
    Overflow,
    #[error("no legal collapse step: {0}")]
    CollapseStuck(String),
}

pub type Result<T> = std::result::Result<T, Error>;
