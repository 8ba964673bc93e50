use thiserror::Error;

/// Errors raised by model construction, queries and I/O.
#[derive(Debug, Error)]
pub enum Error {
    #[error("empty seed set")]
    EmptySeedSet,

    #[error("node {node} out of range for graph with {n} nodes")]
    NodeOutOfRange { node: usize, n: usize },

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("instance too large for exact enumeration: {0}")]
    TooLarge(String),

    #[error("search budget exceeded: {0}")]
    BudgetExceeded(String),

    #[error("{0}")]
    Unsupported(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("{path}: {source}")]
    File { path: String, source: std::io::Error },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for the errors that signal an exhausted enumeration or search budget.
    pub fn is_budget(&self) -> bool {
        matches!(self, Error::TooLarge(_) | Error::BudgetExceeded(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
