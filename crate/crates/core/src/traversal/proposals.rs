use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{Abandoned, ScoreBreakdown, Scorer, Termination, TraversalError, WalkState};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathEntry {
    pub shot: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub score: Option<ScoreBreakdown>,
}

/// One proposal trailer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrailerPath {
    pub start: usize,
    pub steps: Vec<PathEntry>,
    /// Realised sentiment intensity of every shot on the path.
    pub flow_trace: Vec<f64>,
    /// 1-based turning points covered.
    pub tps_covered: Vec<usize>,
    pub terminated_reason: Option<Termination>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub abandoned: Vec<Abandoned>,
    /// Index of an earlier proposal that continues with the same shots after its start.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub duplicate_of: Option<usize>,
}

impl TrailerPath {
    pub fn shots(&self) -> Vec<usize> {
        self.steps.iter().map(|s| s.shot).collect()
    }

    /// Mean total over scored steps; `-inf` when only the start shot exists.
    pub fn mean_score(&self) -> f64 {
        let totals: Vec<f64> = self.steps.iter().filter_map(|s| s.score.map(|b| b.total)).collect();
        if totals.is_empty() {
            f64::NEG_INFINITY
        } else {
            totals.iter().sum::<f64>() / totals.len() as f64
        }
    }
}

/// Greedy walk from `start` until the budget, full coverage (when not
/// filling to budget) or an unrecoverable dead end.
pub fn traverse(scorer: &Scorer<'_>, start: usize) -> Result<TrailerPath, TraversalError> {
    let mut state = WalkState::new();
    state.start(scorer, start)?;
    state.run_to_end(scorer)?;
    state.to_path()
}

/// One walk per start shot: the highest-scoring first-turning-point shots,
/// at most `config.proposals` of them. Output follows start order.
pub fn enumerate_proposals(scorer: &Scorer<'_>) -> Result<Vec<TrailerPath>, TraversalError> {
    let starts: Vec<usize> = scorer
        .tp_sets
        .starts(scorer.config.proposals)
        .into_iter()
        .map(|m| m.shot)
        .collect();
    if starts.is_empty() {
        return Err(TraversalError::NoStartShots);
    }
    run_starts(scorer, &starts)
}

/// Start shots for walks without turning-point information: a seeded
/// sample of distinct non-terminal shots.
pub fn degenerate_starts(n_shots: usize, count: usize, seed: u64) -> Vec<usize> {
    let pool = n_shots.saturating_sub(1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample(&mut rng, pool, count.min(pool)).into_vec()
}

/// Proposals without turning-point information, from seeded starts.
pub fn enumerate_degenerate(scorer: &Scorer<'_>) -> Result<Vec<TrailerPath>, TraversalError> {
    let starts = degenerate_starts(scorer.n_shots(), scorer.config.proposals, scorer.config.rng_seed);
    run_starts(scorer, &starts)
}

fn run_starts(scorer: &Scorer<'_>, starts: &[usize]) -> Result<Vec<TrailerPath>, TraversalError> {
    let mut paths = starts
        .par_iter()
        .map(|&s| traverse(scorer, s))
        .collect::<Result<Vec<_>, _>>()?;
    for i in 0..paths.len() {
        let tail = paths[i].shots().split_off(1);
        if tail.is_empty() {
            continue;
        }
        paths[i].duplicate_of = (0..i).find(|&j| paths[j].shots()[1..] == tail[..]);
    }
    Ok(paths)
}

/// Orders proposals by mean step score (descending), then by turning points
/// covered (more first), then by start shot.
pub fn rank_proposals(mut proposals: Vec<TrailerPath>) -> Result<Vec<TrailerPath>, TraversalError> {
    if proposals.is_empty() {
        return Err(TraversalError::NoProposals);
    }
    proposals.sort_by(|a, b| {
        b.mean_score()
            .total_cmp(&a.mean_score())
            .then(b.tps_covered.len().cmp(&a.tps_covered.len()))
            .then(a.start.cmp(&b.start))
    });
    Ok(proposals)
}
