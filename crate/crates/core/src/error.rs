use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch for {what}: expected {expected}, found {found}")]
    Dimension {
        what: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("no observations")]
    NoObservations,

    #[error("need at least {need} observations, got {got}")]
    TooFewObservations { need: usize, got: usize },

    #[error("feature {feature}: level index {level} out of range (feature has {count} levels)")]
    LevelOutOfRange {
        feature: usize,
        level: usize,
        count: usize,
    },

    #[error("feature {feature}: ordinal level scores must be strictly increasing")]
    ScoresNotIncreasing { feature: usize },

    #[error("response is constant; screening is meaningless")]
    ConstantResponse,

    #[error("response must be binary (0/1) for this operation")]
    NotBinary,

    #[error("{0} requires a categorical design")]
    NeedsCategorical(&'static str),

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("no selectable features: every screening score is below the floor")]
    NoSelectableFeatures,

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("parse error at row {row}, column {column}: {message}")]
    Parse {
        row: usize,
        column: String,
        message: String,
    },

    #[error("replicate {index}: {source}")]
    Replicate {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("{stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for errors caused by malformed input or configuration rather than
    /// by a failure during computation.
    pub fn is_usage(&self) -> bool {
        match self {
            Error::Parse { .. }
            | Error::Config(_)
            | Error::NoObservations
            | Error::Dimension { .. }
            | Error::LevelOutOfRange { .. }
            | Error::ScoresNotIncreasing { .. }
            | Error::NotBinary
            | Error::Csv(_) => true,
            Error::Stage { source, .. } | Error::Replicate { source, .. } => source.is_usage(),
            _ => false,
        }
    }

    pub(crate) fn in_stage(self, stage: &'static str) -> Self {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }
}
