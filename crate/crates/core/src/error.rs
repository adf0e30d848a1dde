use thiserror::Error;

/// Errors raised by graph construction, walk configuration, designs and the harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("node {node} out of range for a graph with {n_nodes} nodes")]
    NodeOutOfRange { node: usize, n_nodes: usize },

    #[error("loop edge at node {0}")]
    LoopEdge(usize),

    #[error("node {node} has degree {degree}, the walk needs at least 2")]
    DegreeTooSmall { node: usize, degree: usize },

    #[error("not a permutation of 0..{0}")]
    NotAPermutation(usize),

    #[error("graph is not a connected 2-regular cycle")]
    NotACycle,

    #[error("node count mismatch: {0} vs {1}")]
    NodeCountMismatch(usize, usize),

    #[error("invalid walk configuration: {0}")]
    InvalidConfig(String),

    #[error("chain reducible: graph is disconnected and r = 0")]
    Reducible,

    #[error("pair chain has {states} states, above the exact-mode cap of {cap}; use burn-in start")]
    ChainTooLarge { states: usize, cap: usize },

    #[error("invalid inclusion probabilities: {0}")]
    InvalidInclusion(String),

    #[error("invalid design parameters: {0}")]
    InvalidDesign(String),

    #[error("design is not enumerable: {0}")]
    NotEnumerable(&'static str),

    #[error("construction failed after {retries} retries: {reason}")]
    ConstructionFailed { retries: usize, reason: String },

    #[error("tie probability is zero for node {node} at order {order}; set r > 0")]
    ZeroTieProbability { node: usize, order: usize },

    #[error("empty candidate set")]
    EmptySearch,

    #[error("{0}")]
    Invalid(String),

    #[error("reproduction failed: {0} strict check(s) out of tolerance")]
    ReproductionFailed(usize),

    #[error("config error at `{path}`: {message}")]
    Config { path: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code for the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::EmptySearch => 3,
            Error::ReproductionFailed(_) => 4,
            Error::Config { .. } | Error::Io(_) | Error::Json(_) | Error::Csv(_) => 1,
            _ => 2,
        }
    }
}
