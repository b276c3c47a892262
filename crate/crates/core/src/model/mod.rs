//! Domain types and the movie graph.

mod flow;
mod graph;
mod hops;
mod similarity;
mod types;

pub use flow::{flow_target, flow_targets, section_sizes, FlowSchedule};
pub use graph::{normalize_transition, sparsify, MovieGraph, Neighbor, ROW_SUM_TOL};
pub use hops::{hop_count, shortest_hops};
pub use similarity::{build_similarity, BilinearWeights, KMode, SimilarityMode, SimilarityParams};
pub use types::{ShotRecord, SignedSentiment, NUM_TPS, SIMPLEX_TOL};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("graph needs >=2 shots (got {0})")]
    TooFewShots(usize),
    #[error("shot {index}: embedding dimension {found}, expected {expected}")]
    DimensionMismatch {
        index: usize,
        expected: usize,
        found: usize,
    },
    #[error("shot {index}: embedding contains non-finite values")]
    NonFiniteEmbedding { index: usize },
    #[error("shot {id}: {reason}")]
    InvalidShot { id: usize, reason: String },
    #[error("matrix must be square with finite entries: {0}")]
    InvalidMatrix(String),
    #[error("invalid similarity parameters: {0}")]
    InvalidParams(String),
    #[error("node {node} out of range for graph of {n_shots} shots")]
    InvalidNode { node: usize, n_shots: usize },
    #[error("flow step {k} out of range 1..={budget}")]
    StepOutOfRange { k: usize, budget: usize },
    #[error("invalid flow schedule: {0}")]
    InvalidSchedule(String),
}
