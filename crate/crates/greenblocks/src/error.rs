use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Core(#[from] greenblocks_core::Error),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Input { path: PathBuf, source: FormatError },
    #[error("invalid argument {flag}: {message}")]
    Argument { flag: &'static str, message: String },
    #[error("writing output: {0}")]
    Output(String),
}

/// A problem in a matrix file, located by line and column when the JSON
/// itself is malformed and by field path otherwise.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FormatError {
    #[error("line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("line {line}: field {field}: {message}")]
    Field { line: usize, field: String, message: String },
}
