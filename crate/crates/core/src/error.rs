use alloc::string::String;

use thiserror::Error;

use crate::graph::EdgeType;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid parameter `{name}`: {reason}")]
    Parameter { name: &'static str, reason: String },

    #[error("node id {id} out of range for a graph with {num_nodes} nodes")]
    NodeOutOfRange { id: usize, num_nodes: usize },

    #[error("graph carries no edge types")]
    Untyped,

    #[error("unknown edge type {ty} (graph declares {declared} types)")]
    UnknownEdgeType { ty: EdgeType, declared: u32 },

    #[error("edges must be either all typed or all untyped")]
    MixedEdgeTypes,

    #[error("Katz iteration diverges after {iterations} iterations; use a smaller attenuation")]
    Divergence { iterations: usize },

    #[error("cannot split edges: {0}")]
    Split(String),

    #[error(
        "non-finite loss at epoch {epoch} (learning rate {learning_rate}); \
         lower the learning rate or check the features for NaN/inf"
    )]
    NonFiniteLoss { epoch: usize, learning_rate: f64 },

    #[error("attention cache is empty; run a forward pass on the graph first")]
    EmptyAttentionCache,

    #[error("attention cache belongs to a graph with {cached} edges, got one with {actual}")]
    StaleAttentionCache { cached: usize, actual: usize },

    #[error("metric is undefined: {0}")]
    Undefined(String),

    #[error("score for node {node} is not finite")]
    NonFiniteScore { node: usize },
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::Parameter { name, reason: reason.into() }
    }
}
