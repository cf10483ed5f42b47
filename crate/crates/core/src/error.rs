use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("cannot access {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("self-loop on node `{0}`")]
    SelfLoop(String),
    #[error("conflicting values for dyad ({0}, {1})")]
    ConflictingDuplicate(String, String),
    #[error("diagonal entry ({0}, {0}) is undefined")]
    Diagonal(usize),
    #[error("node index {index} out of range for n = {n}")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("token stream is empty")]
    EmptyTokens,
    #[error("no observed entries")]
    NoObserved,
    #[error("matrix is not symmetric positive-definite")]
    NotPositiveDefinite,
    #[error("thresholds are not strictly increasing")]
    UnorderedThresholds,
    #[error("empty interval ({lo}, {hi})")]
    EmptyInterval { lo: f64, hi: f64 },
    #[error("trace holds no recorded samples")]
    EmptyTrace,
    #[error("truth labels contain a single class")]
    SingleClass,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
