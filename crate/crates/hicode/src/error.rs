use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("edge weight must be non-negative, got {0}")]
    InvalidWeight(f64),

    #[error("self-loop on node {0} is not allowed")]
    SelfLoop(u32),

    #[error("layer does not cover every node of the graph: {0}")]
    IncompleteLayer(String),

    #[error("operation requires a non-empty graph")]
    EmptyGraph,

    #[error("edge sampling requires uniform edge weights: {0}")]
    HeterogeneousWeights(String),

    #[error("invalid pipeline configuration: {0}")]
    ConfigError(String),

    #[error("modularity is undefined on a graph with zero total weight")]
    ZeroWeightGraph,

    #[error("partitions cover different node sets: {0}")]
    DomainMismatch(String),

    #[error("community set must be non-empty")]
    EmptyCommunitySet,

    #[error("invalid generator parameter: {0}")]
    InvalidParam(String),

    #[error("parse error at line {line}: {message}")]
    ParseError { line: usize, message: String },

    #[error("label {0:?} does not appear in the graph")]
    UnknownLabel(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
