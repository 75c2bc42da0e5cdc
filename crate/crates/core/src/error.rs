use thiserror::Error;

use crate::logic::{AnchorRole, TypeError};

#[derive(Debug, Error)]
pub enum Error {
    #[error("anchor {0} is referenced by the form but absent from the instance")]
    AnchorMissing(AnchorRole),

    #[error("invalid logical form: {}", format_type_errors(.0))]
    InvalidForm(Vec<TypeError>),

    #[error("s-expression syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("invalid label set: {0}")]
    InvalidLabels(String),

    #[error("no parse covers the explanation")]
    NoParse,

    #[error("lexicon error on line {line}: {msg}")]
    Lexicon { line: usize, msg: String },

    #[error("fuzzy operand {0} lies outside [0, 1]")]
    Domain(f64),

    #[error("query is empty")]
    EmptyQuery,

    #[error("configuration error: {0}")]
    Config(String),

    #[error("labeled partition is empty; joint training needs at least one strict match")]
    DegeneratePartition,

    #[error("{path}:{line}: {msg}")]
    Format { path: String, line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

fn format_type_errors(errs: &[TypeError]) -> String {
    errs.iter().map(|e| e.to_string()).collect::<Vec<_>>().join("; ")
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
