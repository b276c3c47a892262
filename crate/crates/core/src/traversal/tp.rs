use serde::{Deserialize, Serialize};

use super::TraversalError;
use crate::model::{MovieGraph, ShotRecord, NUM_TPS};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TpMember {
    pub shot: usize,
    pub score: f64,
}

/// Shots standing for each turning point. Members are kept sorted by shot id.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TpSets {
    sets: [Vec<TpMember>; NUM_TPS],
}

impl TpSets {
    /// No turning-point information; traversal runs in degenerate mode.
    pub fn empty() -> Self {
        Self::default()
    }

    /// Top `per_tp` shots per turning point by predicted score (ties: smaller id).
    /// Shots without scores are skipped.
    pub fn from_scores(shots: &[ShotRecord], per_tp: usize) -> Self {
        let mut sets: [Vec<TpMember>; NUM_TPS] = Default::default();
        for (t, set) in sets.iter_mut().enumerate() {
            let mut ranked: Vec<TpMember> = shots
                .iter()
                .filter_map(|s| s.tp_scores.map(|sc| TpMember { shot: s.id, score: sc[t] }))
                .collect();
            ranked.sort_by(|a, b| b.score.total_cmp(&a.score).then(a.shot.cmp(&b.shot)));
            ranked.truncate(per_tp);
            ranked.sort_by_key(|m| m.shot);
            *set = ranked;
        }
        Self { sets }
    }

    /// Explicit labels; every member gets score 1.
    pub fn from_labels(labels: [Vec<usize>; NUM_TPS]) -> Self {
        let sets = labels.map(|mut ids| {
            ids.sort_unstable();
            ids.dedup();
            ids.into_iter().map(|shot| TpMember { shot, score: 1.0 }).collect()
        });
        Self { sets }
    }

    pub fn validate(&self, n_shots: usize) -> Result<(), TraversalError> {
        for set in &self.sets {
            if let Some(m) = set.iter().find(|m| m.shot >= n_shots) {
                return Err(TraversalError::InvalidShot(m.shot));
            }
        }
        Ok(())
    }

    /// Members of TP `t` (0-based) by shot id.
    pub fn members(&self, t: usize) -> &[TpMember] {
        &self.sets[t]
    }

    pub fn ids(&self, t: usize) -> Vec<usize> {
        self.sets[t].iter().map(|m| m.shot).collect()
    }

    pub fn contains(&self, t: usize, shot: usize) -> bool {
        self.sets[t].binary_search_by_key(&shot, |m| m.shot).is_ok()
    }

    pub fn is_degenerate(&self) -> bool {
        self.sets.iter().all(Vec::is_empty)
    }

    pub fn as_id_sets(&self) -> [Vec<usize>; NUM_TPS] {
        std::array::from_fn(|t| self.ids(t))
    }

    /// Up to `c` start shots: the first TP's members by descending score, ties by id.
    pub fn starts(&self, c: usize) -> Vec<TpMember> {
        let mut ranked = self.sets[0].clone();
        ranked.sort_by(|a, b| b.score.total_cmp(&a.score).then(a.shot.cmp(&b.shot)));
        ranked.truncate(c);
        ranked
    }

    /// Per TP, a mask of shots whose selection covers it: the TP shots
    /// themselves and their immediate graph neighbours.
    pub fn cover_masks(&self, graph: &MovieGraph) -> [Vec<bool>; NUM_TPS] {
        std::array::from_fn(|t| {
            let mut mask = vec![false; graph.n_shots()];
            for m in &self.sets[t] {
                mask[m.shot] = true;
                for nb in graph.neighbors(m.shot) {
                    mask[nb.target] = true;
                }
            }
            mask
        })
    }
}
