use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {reason}")]
    Manifest { line: usize, reason: String },

    #[error("duplicate utterance id {0:?}")]
    DuplicateId(String),

    #[error("utterance {id:?} has non-positive length {length}")]
    NonPositiveLength { id: String, length: i64 },

    #[error("corpus is empty")]
    EmptyCorpus,

    #[error("invalid synthetic spec: {0}")]
    InvalidSynthetic(String),

    #[error("invalid bucket spec: {0}")]
    InvalidBuckets(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("{strategy}: n_bins {n_bins} exceeds corpus size {corpus_size}")]
    TooManyBins {
        strategy: String,
        n_bins: usize,
        corpus_size: usize,
    },

    #[error("utterance {id:?} of length {length} does not fit frame budget {budget}")]
    BudgetTooSmall {
        id: String,
        length: u32,
        budget: u64,
    },

    #[error("plan does not match corpus: {0}")]
    PlanMismatch(String),

    #[error("cannot aggregate an empty list of reports")]
    EmptyAggregate,

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
