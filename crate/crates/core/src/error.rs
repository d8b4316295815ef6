use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("word reduces to the identity")]
    EmptyWord,
    #[error("word is not freely and cyclically reduced")]
    NotCyclicallyReduced,
    #[error("signed index 0 is not a letter")]
    ZeroIndex,
    #[error("invalid complex: {0}")]
    InvalidComplex(String),
    #[error("invalid presentation: {0}")]
    InvalidPresentation(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("need 2^{length} >= {needed} distinct beta words")]
    InsufficientLength { length: usize, needed: usize },
    #[error("no admissible presentation after {rounds} rounds (level {level}, seed {seed})")]
    GenerationFailed { level: usize, seed: u64, rounds: usize },
    #[error("presentation does not satisfy C'(1/6); Dehn reduction certifies nothing")]
    NotSmallCancellation,
    #[error("word length {length} exceeds cap {cap}")]
    DepthExceeded { length: u64, cap: u64 },
    #[error("cell {cell} has odd boundary length {length}")]
    OddBoundary { cell: usize, length: usize },
    #[error("wallspace has no points and no walls")]
    EmptyWallspace,
    #[error("{vertices} vertices exceeds cap {cap}")]
    TooLarge { vertices: usize, cap: usize },
    #[error("cannot parse word: {0}")]
    Parse(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
