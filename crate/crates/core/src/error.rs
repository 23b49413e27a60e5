use std::io;
use std::path::PathBuf;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid UTF-8 at byte offset {0}")]
    InvalidEncoding(usize),

    #[error("invalid removal character class: {0}")]
    InvalidRemovalClass(String),

    #[error("no token survives the minimum count threshold")]
    EmptyVocabulary,

    #[error("corpus contains no usable tokens")]
    EmptyCorpus,

    #[error("unknown vocabulary id {0}")]
    UnknownId(usize),

    #[error("unknown word `{0}`")]
    UnknownWord(String),

    #[error("word `{0}` has no vocabulary row and no admissible n-grams")]
    NoRepresentation(String),

    #[error("zero vector has no direction")]
    ZeroVector,

    #[error("series lengths differ ({0} vs {1})")]
    LengthMismatch(usize, usize),

    #[error("need at least 2 scored pairs, got {0}")]
    TooFewPairs(usize),

    #[error("need at least {needed} items, got {got}")]
    TooFewItems { needed: usize, got: usize },

    #[error("ranking has zero variance")]
    ZeroVariance,

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("duplicate pair ({0}, {1})")]
    DuplicatePair(String, String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid model file: {0}")]
    InvalidModel(String),

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }
}
