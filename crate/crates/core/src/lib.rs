//! Shot-graph trailer generation.
//!
//! A movie is modelled as a directed graph over its shots whose edges only
//! point forward in time. Trailer proposals are greedy walks over that graph
//! scored by semantic similarity, temporal proximity, distance to the next
//! turning point and agreement with a target sentiment-intensity flow.
//!
//! The crate is split into:
//! - [`model`]: shot records, similarity, transition matrix, sparsification,
//!   hop distances and the sentiment flow schedule.
//! - [`traversal`]: step scoring, the greedy walker, proposal enumeration and ranking.
//! - [`numerics`]: fusion and consistency/contrastive losses with analytic gradients.
//! - [`ingest`]: bundle I/O, DTW alignment, silver trailer labels, label projection.
//! - [`evalkit`]: metrics and corpus analyses.
//! - [`config`] and [`pipeline`]: engine defaults and bundle-to-proposals glue.

pub mod config;
pub mod evalkit;
pub mod ingest;
pub mod linalg;
pub mod model;
pub mod numerics;
pub mod pipeline;
pub mod traversal;

pub use config::EngineConfig;
pub use linalg::Matrix;
