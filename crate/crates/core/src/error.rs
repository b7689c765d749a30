use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// A malformed record in one of the line-oriented input formats.
    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("duplicate synset id `{0}`")]
    DuplicateSynset(String),

    #[error("duplicate link ({lemma}, {synset})")]
    DuplicateLink { lemma: String, synset: String },

    #[error("synset id `{0}` has no part-of-speech suffix")]
    UnknownPos(String),

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("empty vocabulary: no word reaches min_count = {min_count}")]
    EmptyVocabulary { min_count: usize },

    #[error("requested {requested} negative instances but only {available} candidates are available")]
    NegativePoolTooSmall { requested: usize, available: usize },

    #[error("class `{class}` has {count} instances; at least {needed} required")]
    ClassTooSmall {
        class: String,
        count: usize,
        needed: usize,
    },

    #[error("k = {k} exceeds training size {size}")]
    KTooLarge { k: usize, size: usize },

    #[error("non-finite value for feature `{0}`")]
    NonFinite(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("missing features for link ({lemma}, {synset})")]
    MissingFeatures { lemma: String, synset: String },

    /// Broken internal consistency. The CLI maps this to exit status 2.
    #[error("internal invariant violated: {0}")]
    Invariant(String),

    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn parse(path: impl Into<PathBuf>, line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            line,
            message: message.into(),
        }
    }

    pub fn is_internal(&self) -> bool {
        matches!(self, Error::Invariant(_))
    }
}
