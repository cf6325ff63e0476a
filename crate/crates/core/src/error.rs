use thiserror::Error;

#[derive(Debug, Error)]
pub enum DsoError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("contract violation: {0}")]
    Contract(String),
    #[error("no replacement path")]
    NoReplacementPath,
    #[error("internal inconsistency: {0}")]
    Internal(String),
    #[error("oracle file: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, DsoError>;
