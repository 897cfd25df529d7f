use thiserror::Error;

/// Failure while reading one of the tab-separated data files (lexicons,
/// rules, datasets, corpus).
#[derive(Debug, Error)]
pub enum DataError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: {message}")]
    Line { line: usize, message: String },
    #[error("{0}")]
    Invalid(String),
}

impl DataError {
    pub(crate) fn line(line: usize, message: impl Into<String>) -> Self {
        DataError::Line {
            line,
            message: message.into(),
        }
    }
}
