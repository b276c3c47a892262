use std::collections::BTreeSet;

use super::EvalError;
use crate::model::{ShotRecord, NUM_TPS};
use crate::traversal::TpSets;

/// Attached to every overlap figure the tools report.
pub const OVERLAP_DEFINITION: &str = "mean over trailer pairs of 100*|A∩B|/min(|A|,|B|)";

/// Percentage of turning points (among those with gold shots) whose
/// predicted shots hit at least one gold shot.
pub fn partial_agreement(predicted: &[Vec<usize>; NUM_TPS], gold: &[Vec<usize>; NUM_TPS]) -> Result<f64, EvalError> {
    let mut with_gold = 0usize;
    let mut hits = 0usize;
    for (pred, gold) in predicted.iter().zip(gold) {
        if gold.is_empty() {
            continue;
        }
        with_gold += 1;
        if pred.iter().any(|s| gold.contains(s)) {
            hits += 1;
        }
    }
    if with_gold == 0 {
        return Err(EvalError::NoGold);
    }
    Ok(100.0 * hits as f64 / with_gold as f64)
}

/// Top `k` shots per turning point by predicted score.
pub fn top_k_per_tp(shots: &[ShotRecord], k: usize) -> Result<[Vec<usize>; NUM_TPS], EvalError> {
    if k == 0 {
        return Err(EvalError::ZeroK);
    }
    Ok(TpSets::from_scores(shots, k).as_id_sets())
}

/// PA@k from shot-level turning-point scores.
pub fn partial_agreement_at_k(shots: &[ShotRecord], gold: &[Vec<usize>; NUM_TPS], k: usize) -> Result<f64, EvalError> {
    partial_agreement(&top_k_per_tp(shots, k)?, gold)
}

/// Percentage of selected shots carrying a positive silver label.
pub fn trailer_accuracy(selected: &[usize], labels: &[bool]) -> Result<f64, EvalError> {
    if selected.is_empty() {
        return Err(EvalError::EmptySelection);
    }
    let mut hits = 0usize;
    for &s in selected {
        match labels.get(s) {
            Some(true) => hits += 1,
            Some(false) => {}
            None => {
                return Err(EvalError::ShotOutOfRange {
                    shot: s,
                    n_shots: labels.len(),
                })
            }
        }
    }
    Ok(100.0 * hits as f64 / selected.len() as f64)
}

/// Agreement between the official trailers of one movie; see [`OVERLAP_DEFINITION`].
pub fn overlap_upper_bound(trailers: &[Vec<usize>]) -> Result<f64, EvalError> {
    if trailers.len() < 2 {
        return Err(EvalError::TooFewTrailers(trailers.len()));
    }
    let sets: Vec<BTreeSet<usize>> = trailers.iter().map(|t| t.iter().copied().collect()).collect();
    if let Some(i) = sets.iter().position(BTreeSet::is_empty) {
        return Err(EvalError::EmptyTrailer(i));
    }
    let mut total = 0.0;
    let mut pairs = 0usize;
    for i in 0..sets.len() {
        for j in i + 1..sets.len() {
            let common = sets[i].intersection(&sets[j]).count();
            total += 100.0 * common as f64 / sets[i].len().min(sets[j].len()) as f64;
            pairs += 1;
        }
    }
    Ok(total / pairs as f64)
}
