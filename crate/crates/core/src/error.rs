use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("empty corpus")]
    EmptyCorpus,

    #[error("no feature survives min_frequency={0}")]
    NoRetainedFeatures(u64),

    #[error("average active feature count must be positive, got {0}")]
    InvalidAverageActive(f64),

    #[error("invalid hyperparameters: {0}")]
    InvalidParams(String),

    #[error("invalid sparse vector: {0}")]
    InvalidVector(String),

    #[error("no training examples")]
    EmptyExamples,

    #[error("undefined recall: no positive labels")]
    UndefinedRecall,

    #[error("empty precision/recall curve")]
    EmptyCurve,

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("{0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }
}
