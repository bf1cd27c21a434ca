use thiserror::Error;

/// Parse failure with a 1-based source position.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl ParseError {
    pub fn new(line: usize, column: usize, message: impl Into<String>) -> Self {
        ParseError {
            line,
            column,
            message: message.into(),
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("generator index {index} out of range for rank {rank}")]
    GeneratorOutOfRank { index: usize, rank: usize },

    #[error("no image supplied for generator {index}")]
    MissingImage { index: usize },

    #[error("invalid move: {0}")]
    InvalidMove(String),

    #[error("rank mismatch: expected {expected}, got {got}")]
    RankMismatch { expected: usize, got: usize },

    #[error("invalid generator pair ({i}, {j})")]
    InvalidPair { i: usize, j: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("presentation has {generators} generators and {relators} relators; need at least two more generators than relators")]
    NotBp { generators: usize, relators: usize },

    #[error("relator {relator} has nonzero exponent sum {sum} in the distinguished generator")]
    NotGood { relator: usize, sum: i64 },

    #[error("bad coset table: {0}")]
    BadTable(String),

    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error("certificate assigns no image to label {label}")]
    UnassignedLabel { label: String },

    #[error("bad certificate: {0}")]
    BadCertificate(String),
}

pub type Result<T> = std::result::Result<T, Error>;
