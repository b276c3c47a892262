//! Greedy multi-criteria walks over the shot graph.

mod config;
mod proposals;
mod score;
mod tp;
mod walker;

pub use config::{FlowShape, Lambdas, SentimentTerm, SpoilerPenalty, TraversalConfig};
pub use proposals::{
    degenerate_starts, enumerate_degenerate, enumerate_proposals, rank_proposals, traverse,
    PathEntry, TrailerPath,
};
pub use score::{step_score, ScoreBreakdown, Scorer};
pub use tp::{TpMember, TpSets};
pub use walker::{Abandoned, Candidate, PathStep, Termination, WalkState};

use thiserror::Error;

use crate::model::ModelError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TraversalError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("invalid config at {field}: {reason}")]
    InvalidConfig { field: String, reason: String },
    #[error("shot {0} is out of range")]
    InvalidShot(usize),
    #[error("shot {0} is not a first-turning-point shot")]
    InvalidStart(usize),
    #[error("shot {to} is not in the neighbourhood of shot {from}")]
    NotANeighbor { from: usize, to: usize },
    #[error("shot {0} is not a legal candidate")]
    IllegalChoice(usize),
    #[error("expected {expected} sentiment values, got {found}")]
    SentimentLength { expected: usize, found: usize },
    #[error("no first-turning-point shots to start from; use degenerate mode")]
    NoStartShots,
    #[error("no proposals to rank")]
    NoProposals,
    #[error("walk has not started")]
    NotStarted,
    #[error("walk has already started")]
    AlreadyStarted,
    #[error("walk already finished ({0:?})")]
    Finished(Termination),
}
