//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("empty vocabulary: no word meets min_count")]
    EmptyVocabulary,

    #[error("co-occurrence counts are empty")]
    EmptyCounts,

    #[error("pair ({w}, {c}) has zero joint probability; PMI is undefined off the support")]
    UnsupportedPair { w: usize, c: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("weight vector does not match: {0}")]
    WeightMismatch(String),

    #[error("word not in vocabulary: {0:?}")]
    WordNotFound(String),

    #[error("duplicate word: {0:?}")]
    DuplicateWord(String),

    #[error("word {0:?} appears in more than one OR spec")]
    OverlappingOrMembers(String),

    #[error("merged token {0:?} already occurs in the corpus")]
    MergedTokenExists(String),

    #[error("{path}:{line}: {msg}")]
    MalformedFile {
        path: String,
        line: usize,
        msg: String,
    },

    #[error("query vector is zero; cosine ranking is undefined")]
    ZeroQueryVector,

    #[error("evaluation set is empty")]
    EmptyEvaluation,

    #[error("correlation undefined: {0} scores are constant")]
    ConstantScores(&'static str),

    #[error("degenerate regression: {0}")]
    DegenerateRegression(String),

    #[error("training diverged at epoch {epoch}: objective = {value}")]
    Divergence { epoch: usize, value: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn malformed(path: impl Into<String>, line: usize, msg: impl Into<String>) -> Self {
        Error::MalformedFile {
            path: path.into(),
            line,
            msg: msg.into(),
        }
    }
}
