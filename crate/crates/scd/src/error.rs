//! Error type shared across the crate.

use thiserror::Error;

/// Errors produced by graph I/O, embedding, clustering and search.
#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("line {line}: {reason}")]
    MalformedLine { line: usize, reason: String },

    #[error("line {line}: non-positive edge weight {weight}")]
    NonPositiveWeight { line: usize, weight: f64 },

    #[error("empty input: no nodes or edges found")]
    EmptyInput,

    #[error("unknown node token `{0}`")]
    UnknownToken(String),

    #[error("node `{0}` has no label in the partition file")]
    MissingLabel(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("graph has {nodes} nodes, above the dense-matrix limit of {limit} (use a smaller graph or the ppr backend)")]
    DenseLimitExceeded { nodes: usize, limit: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("k = {k} exceeds the number of distinct rows ({distinct})")]
    KExceedsDistinctRows { k: usize, distinct: usize },

    #[error("input matrix has no rows")]
    EmptyMatrix,

    #[error("candidate cluster range is empty")]
    EmptyRange,

    #[error("need at least 2 clusters, got {0}")]
    TooFewClusters(usize),

    #[error("graph has no edges")]
    EdgelessGraph,

    #[error("infeasible parameters: {0}")]
    Infeasible(String),

    #[error("no embedding parameter sets given")]
    NoParamSets,

    #[error("all embeddings failed; last error: {0}")]
    AllEmbeddingsFailed(String),
}

pub type Result<T> = std::result::Result<T, Error>;
