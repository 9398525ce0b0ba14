use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {left} attributes vs {right}")]
    Dimension { left: usize, right: usize },

    #[error("average over an empty set of rows")]
    EmptyCoverage,

    #[error("capacity exceeded: {0}")]
    Capacity(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("out of range: {0}")]
    Range(String),

    #[error("row {row}: {message}")]
    Ingest { row: usize, message: String },

    #[error("row {row} duplicates row {first} (pass allow_duplicates to keep both)")]
    DuplicateRow { row: usize, first: usize },

    #[error("input has no data rows")]
    EmptyDataset,

    #[error("result shape mismatch: {0}")]
    Shape(String),

    #[error("connection failed: {0}")]
    Connection(String),

    #[error("cluster is not a candidate of this coverage index")]
    NotCandidate,

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("corrupt store file: {0}")]
    CorruptStore(String),

    #[error("store format version {found} is not supported (expected {expected})")]
    StoreVersion { found: u32, expected: u32 },

    #[error("store was built over a different dataset")]
    StoreMismatch,

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Whether the error stems from bad input or parameters rather than a
    /// failure while running.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::Dimension { .. }
                | Error::Capacity(_)
                | Error::Parameter(_)
                | Error::Range(_)
                | Error::Ingest { .. }
                | Error::DuplicateRow { .. }
                | Error::EmptyDataset
                | Error::Shape(_)
                | Error::NotCandidate
        )
    }
}
