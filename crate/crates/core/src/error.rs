use std::path::PathBuf;

use crate::bioc::Violation;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("XML parse error at {line}:{column}: {message}")]
    Xml { line: u32, column: u32, message: String },

    #[error("BioC schema error at {line}:{column}: {message}")]
    Schema { line: u32, column: u32, message: String },

    #[error("invalid collection ({} violation(s)): {}", .0.len(), summarize(.0))]
    Validation(Vec<Violation>),

    #[error("conversion error: {0}")]
    Conversion(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("CSV error at row {row}: {message}")]
    Csv { row: u64, message: String },

    #[error("resource {path}: {message}")]
    Resource { path: String, message: String },

    #[error("pattern syntax error at column {column}: {message}")]
    Pattern { column: usize, message: String },

    #[error("bracketed tree error at position {position}: {message}")]
    Tree { position: usize, message: String },

    #[error("CoNLL-U error at line {line}: {message}")]
    Conllu { line: usize, message: String },

    #[error("invalid dependency graph: {0}")]
    Graph(String),

    #[error("token alignment error: {0}")]
    Alignment(String),

    #[error("pipeline order error: {0}")]
    PipelineOrder(String),

    #[error("{stage}: {message}")]
    Stage { stage: String, message: String },

    #[error("{}: {source}", .path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

fn summarize(violations: &[Violation]) -> String {
    violations
        .iter()
        .take(5)
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn resource(path: impl std::fmt::Display, message: impl Into<String>) -> Self {
        Error::Resource {
            path: path.to_string(),
            message: message.into(),
        }
    }
}
