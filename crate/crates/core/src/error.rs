use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid schema: {0}")]
    Schema(String),

    #[error("invalid tree definition: {0}")]
    Tree(String),

    #[error("empty active subspace")]
    EmptyActiveSubspace,

    #[error("unknown component `{0}`")]
    UnknownComponent(String),

    #[error("`{0}` is not a predictor")]
    NotAPredictor(String),

    #[error("invalid dataset: {0}")]
    Dataset(String),

    #[error("feature arity mismatch: model expects {expected}, got {got}")]
    ArityMismatch { expected: usize, got: usize },

    #[error("component `{component}` cannot handle missing values")]
    MissingValues { component: String },

    #[error("no features left after preprocessing")]
    NoFeatures,

    #[error("budget exhausted")]
    BudgetExhausted,

    #[error("dataset `{0}` absent from meta-knowledge base")]
    DatasetAbsent(String),

    #[error("no comparable prior dataset")]
    NoComparableDataset,

    #[error("metabase file is corrupt: {0}")]
    Corrupt(String),

    #[error("metabase format version {found} is not supported (expected {expected})")]
    VersionMismatch { found: u32, expected: u32 },

    #[error("analysis precondition failed: {0}")]
    Analysis(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
