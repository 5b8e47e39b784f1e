use std::path::PathBuf;

/// Errors produced by the vectorization pipeline and its supporting modules.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid diagram point ({birth}, {death}): {reason}")]
    InvalidPoint {
        birth: f64,
        death: f64,
        reason: &'static str,
    },
    #[error("clamp below birth: clamp value {clamp} is smaller than birth {birth}")]
    ClampBelowBirth { clamp: f64, birth: f64 },
    #[error("no points to fit grid")]
    EmptyTrainingSet,
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("unsupported wavelet order {order} for {family}")]
    UnsupportedOrder { family: &'static str, order: u8 },
    #[error("transform {0} is not a wavelet")]
    NotAWavelet(String),
    #[error("unknown transform name {0:?}")]
    UnknownTransform(String),
    #[error("filter table {name} failed invariant check: {reason}")]
    BadFilter { name: String, reason: String },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("simplex budget exceeded: {count} triangles at max_scale {max_scale}; try max_scale <= {suggested:.6}")]
    SimplexBudget {
        count: u64,
        max_scale: f64,
        suggested: f64,
    },
    #[error("need at least two classes to train, found {0}")]
    SingleClass(usize),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("class {class} has {count} member(s); stratification needs at least 2")]
    TooFewInClass { class: usize, count: usize },
    #[error("cannot make {k} folds out of {n} samples")]
    TooManyFolds { k: usize, n: usize },
    #[error("empty candidate list")]
    EmptyCandidates,
    #[error("parse error in {path}: {msg}")]
    Parse { path: PathBuf, msg: String },
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn io_err(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> Error {
    let path = path.into();
    move |source| Error::Io { path, source }
}
