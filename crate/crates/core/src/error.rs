use thiserror::Error;

/// Failures surfaced by the library.
///
/// `Input` variants map to exit status 2 in the CLI, everything else to 1.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("input error: {0}")]
    Input(String),
    #[error("selection infeasible ({case}): {detail}")]
    SelectionInfeasible { case: String, detail: String },
    #[error("partition failure after {iterations} resampling steps; worst vertex {worst_vertex}")]
    PartitionFailure { iterations: usize, worst_vertex: usize },
    #[error("bad-set failure: {0}")]
    BadSet(String),
    #[error("connection failure at pair {pair} (stage {stage}): {detail}")]
    Connection {
        pair: usize,
        stage: String,
        detail: String,
    },
    #[error("hierarchy failure: uncovered vertices {0:?}")]
    Hierarchy(Vec<usize>),
    #[error("hall failure: deficient set {0:?}")]
    Hall(Vec<usize>),
    #[error("cover failure at vertex {vertex}: {detail}")]
    Cover { vertex: usize, detail: String },
    #[error("pattern out of range: {0}")]
    PatternOutOfRange(String),
    #[error("stage {stage} failed: {detail}")]
    Stage { stage: String, detail: String },
}

impl Error {
    pub fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub fn is_input(&self) -> bool {
        matches!(self, Error::Input(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
