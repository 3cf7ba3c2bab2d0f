use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: malformed token line: {reason}")]
    MalformedLine { line: usize, reason: String },

    #[error("sentence {sentence}: token {token} has dangling HEAD {head}")]
    DanglingHead { sentence: String, token: u32, head: u32 },

    #[error("{path}: {source}")]
    InFile {
        path: PathBuf,
        #[source]
        source: Box<Error>,
    },

    #[error("duplicate document id {0:?}")]
    DuplicateDocument(String),

    #[error("mixed languages in one ingest: {0} and {1}")]
    MixedLanguages(String, String),

    #[error("invalid unit: {0}")]
    InvalidUnit(String),

    #[error("unknown lexical unit {0}")]
    UnknownUnit(String),

    #[error("clique budget exceeded after {found} cliques")]
    CliqueBudgetExceeded { found: usize },

    #[error("no senses to project")]
    NoSenses,

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("not found: {0}")]
    NotFound(String),

    #[error("unsupported format version {found} (expected {expected})")]
    VersionMismatch { found: u32, expected: u32 },

    #[error("checksum mismatch for {file}")]
    Checksum { file: String },

    #[error("integrity violation: {0}")]
    Integrity(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dictionary line {line}: {reason}")]
    MalformedDictionary { line: usize, reason: String },

    #[error("config: {0}")]
    Config(String),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn in_file(path: impl Into<PathBuf>, err: Error) -> Error {
        Error::InFile { path: path.into(), source: Box::new(err) }
    }
}
