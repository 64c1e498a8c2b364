use num_bigint::BigUint;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("network would have {nodes} nodes, above the limit of {limit}")]
    SizeLimit { nodes: BigUint, limit: u64 },

    #[error("matrix is singular (graph disconnected or block not invertible)")]
    Singular,

    #[error("node {node} does not exist at level {level}")]
    Genealogy { node: usize, level: u32 },

    #[error("unknown node id {0}")]
    UnknownNode(usize),

    #[error("identical nodes given where a distinct pair is required: {0}")]
    SamePair(usize),

    #[error("{quantity}: {left} disagrees with {right}")]
    ProvenanceMismatch {
        quantity: &'static str,
        left: String,
        right: String,
    },

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
