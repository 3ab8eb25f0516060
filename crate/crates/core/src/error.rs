use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("empty input: no edges found")]
    EmptyInput,

    #[error("node set does not match graph: expected universe {expected}, got {got}")]
    UniverseMismatch { expected: usize, got: usize },

    #[error("graph is empty, minimum degree undefined")]
    EmptyGraph,

    #[error("instance is not preprocessed: graph differs from its own {0}-core")]
    NotPreprocessed(u32),

    #[error("budget mismatch: expected a set of {expected} nodes, got {got}")]
    BudgetMismatch { expected: usize, got: usize },

    #[error("node set is not a {k}-subcore: minimum induced degree {found} < {k}")]
    NotASubcore { k: u32, found: usize },

    #[error("minimum induced degree is {found}, expected exactly {expected}")]
    MinDegreeMismatch { expected: u32, found: usize },

    #[error("cut refused: {0}")]
    CutRefused(String),

    #[error("enumeration cap exceeded: C({n},{b}) > {cap}")]
    CapExceeded { n: usize, b: usize, cap: u128 },

    #[error("model contains bilinear terms; linearize before writing LP text")]
    BilinearUnsupported,

    #[error("assignment is missing variables: {0:?}")]
    MissingVariables(Vec<String>),

    #[error("cascade needs {needed} rounds but horizon is {horizon}")]
    HorizonExceeded { needed: u32, horizon: u32 },

    #[error("budget {b} exceeds node count {n}")]
    BudgetTooLarge { b: usize, n: usize },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
