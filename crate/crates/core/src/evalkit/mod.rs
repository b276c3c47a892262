//! Scores for turning-point predictions and generated trailers, and corpus statistics.

mod analysis;
mod metrics;

pub use analysis::{analysis_stats, thematic_unit, AnalysisAccumulator, AnalysisReport, THEMATIC_UNITS};
pub use metrics::{overlap_upper_bound, partial_agreement, partial_agreement_at_k, top_k_per_tp, trailer_accuracy, OVERLAP_DEFINITION};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EvalError {
    #[error("no turning point has gold shots")]
    NoGold,
    #[error("k must be at least 1")]
    ZeroK,
    #[error("selection is empty")]
    EmptySelection,
    #[error("shot {shot} out of range for {n_shots} labels")]
    ShotOutOfRange { shot: usize, n_shots: usize },
    #[error("need at least 2 trailers, got {0}")]
    TooFewTrailers(usize),
    #[error("trailer {0} has no shots")]
    EmptyTrailer(usize),
}
