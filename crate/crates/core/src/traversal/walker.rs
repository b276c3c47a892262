//! Step-by-step walk state shared by batch traversal and interactive sessions.

use serde::{Deserialize, Serialize};

use super::{ScoreBreakdown, Scorer, TrailerPath, TraversalError};
use crate::model::NUM_TPS;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Termination {
    Budget,
    AllTps,
    DeadEnd,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathStep {
    pub shot: usize,
    /// `None` for the start shot, which is not chosen by score.
    pub score: Option<ScoreBreakdown>,
    pub intensity: f64,
    /// Turning points covered once this shot is on the path.
    pub covered: [bool; NUM_TPS],
}

/// A shot dropped by backtracking because it had no way forward.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Abandoned {
    pub shot: usize,
    /// 1-based path position it was tried at.
    pub step: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub shot: usize,
    pub score: ScoreBreakdown,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct WalkState {
    steps: Vec<PathStep>,
    abandoned: Vec<Abandoned>,
    finished: Option<Termination>,
}

impl WalkState {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn steps(&self) -> &[PathStep] {
        &self.steps
    }

    pub fn shots(&self) -> Vec<usize> {
        self.steps.iter().map(|s| s.shot).collect()
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn finished(&self) -> Option<Termination> {
        self.finished
    }

    pub fn abandoned(&self) -> &[Abandoned] {
        &self.abandoned
    }

    pub fn covered(&self) -> [bool; NUM_TPS] {
        self.steps.last().map_or([false; NUM_TPS], |s| s.covered)
    }

    /// Places the first shot. With turning-point information the start must
    /// be one of the first turning point's shots.
    pub fn start(&mut self, scorer: &Scorer<'_>, shot: usize) -> Result<(), TraversalError> {
        if !self.steps.is_empty() {
            return Err(TraversalError::AlreadyStarted);
        }
        scorer.graph.check_node(shot)?;
        let tps = scorer.tp_sets;
        if !tps.members(0).is_empty() && !tps.contains(0, shot) {
            return Err(TraversalError::InvalidStart(shot));
        }
        self.push(scorer, shot, None);
        Ok(())
    }

    /// Legal next shots, best first (ties: smaller shot id).
    pub fn candidates(&self, scorer: &Scorer<'_>) -> Result<Vec<Candidate>, TraversalError> {
        let current = self.steps.last().ok_or(TraversalError::NotStarted)?.shot;
        Ok(self.candidates_from(scorer, current, self.steps.len() + 1, &self.covered()))
    }

    fn candidates_from(
        &self,
        scorer: &Scorer<'_>,
        current: usize,
        k: usize,
        covered: &[bool; NUM_TPS],
    ) -> Vec<Candidate> {
        let next_tp = scorer.next_tp(covered);
        let mut out: Vec<Candidate> = scorer
            .graph
            .neighbors(current)
            .iter()
            .filter(|nb| self.is_legal(nb.target))
            .map(|nb| Candidate {
                shot: nb.target,
                score: scorer.score(current, nb.target, nb.weight, k, next_tp),
            })
            .collect();
        out.sort_by(|a, b| b.score.total.total_cmp(&a.score.total).then(a.shot.cmp(&b.shot)));
        out
    }

    fn is_legal(&self, shot: usize) -> bool {
        !self.steps.iter().any(|s| s.shot == shot) && !self.abandoned.iter().any(|a| a.shot == shot)
    }

    fn has_way_forward(&self, scorer: &Scorer<'_>, shot: usize) -> bool {
        scorer.graph.neighbors(shot).iter().any(|nb| self.is_legal(nb.target))
    }

    fn push(&mut self, scorer: &Scorer<'_>, shot: usize, score: Option<ScoreBreakdown>) {
        let mut covered = self.covered();
        for (t, c) in covered.iter_mut().enumerate() {
            *c |= scorer.covers(t, shot);
        }
        self.steps.push(PathStep {
            shot,
            score,
            intensity: scorer.intensity(shot),
            covered,
        });
        self.settle(scorer);
    }

    fn settle(&mut self, scorer: &Scorer<'_>) {
        if self.steps.len() >= scorer.config.budget {
            self.finished = Some(Termination::Budget);
        } else if !scorer.config.fill_to_budget && scorer.all_covered(&self.covered()) {
            self.finished = Some(Termination::AllTps);
        }
    }

    fn ensure_open(&self) -> Result<(), TraversalError> {
        match self.finished {
            Some(reason) => Err(TraversalError::Finished(reason)),
            None if self.steps.is_empty() => Err(TraversalError::NotStarted),
            None => Ok(()),
        }
    }

    /// Greedy step. At a dead end the last shot is swapped for the best
    /// alternative from its predecessor that still has a way forward; if
    /// there is none the walk ends.
    pub fn advance_auto(&mut self, scorer: &Scorer<'_>) -> Result<(), TraversalError> {
        self.ensure_open()?;
        let candidates = self.candidates(scorer)?;
        if let Some(best) = candidates.first() {
            self.push(scorer, best.shot, Some(best.score));
            return Ok(());
        }
        if self.steps.len() < 2 {
            self.finished = Some(Termination::DeadEnd);
            return Ok(());
        }

        let k = self.steps.len();
        let mark = self.abandoned.len();
        let stuck = self.steps.pop().expect("len >= 2");
        self.abandoned.push(Abandoned { shot: stuck.shot, step: k });
        let pred = self.steps.last().expect("len >= 1").shot;
        let covered = self.covered();
        for alt in self.candidates_from(scorer, pred, k, &covered) {
            self.steps.push(PathStep {
                shot: alt.shot,
                score: Some(alt.score),
                intensity: 0.0,
                covered,
            });
            let forward = self.has_way_forward(scorer, alt.shot);
            self.steps.pop();
            if forward {
                self.push(scorer, alt.shot, Some(alt.score));
                return Ok(());
            }
            self.abandoned.push(Abandoned { shot: alt.shot, step: k });
        }

        self.abandoned.truncate(mark);
        self.steps.push(stuck);
        self.finished = Some(Termination::DeadEnd);
        Ok(())
    }

    /// Human override: extend the path with a specific legal candidate.
    pub fn advance_to(&mut self, scorer: &Scorer<'_>, shot: usize) -> Result<(), TraversalError> {
        self.ensure_open()?;
        let chosen = self
            .candidates(scorer)?
            .into_iter()
            .find(|c| c.shot == shot)
            .ok_or(TraversalError::IllegalChoice(shot))?;
        self.push(scorer, chosen.shot, Some(chosen.score));
        Ok(())
    }

    /// Runs greedy steps until the walk ends.
    pub fn run_to_end(&mut self, scorer: &Scorer<'_>) -> Result<(), TraversalError> {
        while self.finished.is_none() {
            self.advance_auto(scorer)?;
        }
        Ok(())
    }

    pub fn to_path(&self) -> Result<TrailerPath, TraversalError> {
        let start = self.steps.first().ok_or(TraversalError::NotStarted)?.shot;
        let covered = self.covered();
        Ok(TrailerPath {
            start,
            steps: self
                .steps
                .iter()
                .map(|s| super::PathEntry {
                    shot: s.shot,
                    score: s.score,
                })
                .collect(),
            flow_trace: self.steps.iter().map(|s| s.intensity).collect(),
            tps_covered: (0..NUM_TPS).filter(|&t| covered[t]).map(|t| t + 1).collect(),
            terminated_reason: self.finished,
            abandoned: self.abandoned.clone(),
            duplicate_of: None,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{MovieGraph, SignedSentiment};
    use crate::traversal::{Lambdas, TpSets, TraversalConfig};

    fn semantic_only(budget: usize) -> TraversalConfig {
        TraversalConfig {
            lambdas: Lambdas::new(1.0, 0.0, 0.0, 0.0),
            budget,
            ..Default::default()
        }
    }

    #[test]
    fn backtracks_once_around_a_dead_end() {
        // 0 -> {1 (0.6), 2 (0.4)}; 1 is terminal-ish (only edge back into path), 2 -> 3
        let g = MovieGraph::from_neighborhoods(
            4,
            vec![vec![(1, 0.6), (2, 0.4)], vec![], vec![(3, 1.0)], vec![]],
        )
        .unwrap();
        let s = vec![SignedSentiment::default(); 4];
        let tp = TpSets::empty();
        let c = semantic_only(3);
        let scorer = Scorer::new(&g, &s, &tp, &c).unwrap();
        let mut w = WalkState::new();
        w.start(&scorer, 0).unwrap();
        w.run_to_end(&scorer).unwrap();
        assert_eq!(w.shots(), vec![0, 2, 3]);
        assert_eq!(w.abandoned(), &[Abandoned { shot: 1, step: 2 }]);
        assert_eq!(w.finished(), Some(Termination::Budget));
    }

    #[test]
    fn failed_backtrack_keeps_path_and_stops() {
        let g = MovieGraph::from_neighborhoods(3, vec![vec![(1, 1.0)], vec![], vec![]]).unwrap();
        let s = vec![SignedSentiment::default(); 3];
        let tp = TpSets::empty();
        let c = semantic_only(3);
        let scorer = Scorer::new(&g, &s, &tp, &c).unwrap();
        let mut w = WalkState::new();
        w.start(&scorer, 0).unwrap();
        w.run_to_end(&scorer).unwrap();
        assert_eq!(w.shots(), vec![0, 1]);
        assert!(w.abandoned().is_empty());
        assert_eq!(w.finished(), Some(Termination::DeadEnd));
        assert!(matches!(w.advance_auto(&scorer), Err(TraversalError::Finished(_))));
    }

    #[test]
    fn manual_choice_must_be_a_candidate() {
        let g = MovieGraph::from_neighborhoods(
            4,
            vec![vec![(1, 0.5), (2, 0.5)], vec![(3, 1.0)], vec![(3, 1.0)], vec![]],
        )
        .unwrap();
        let s = vec![SignedSentiment::default(); 4];
        let tp = TpSets::empty();
        let c = semantic_only(4);
        let scorer = Scorer::new(&g, &s, &tp, &c).unwrap();
        let mut w = WalkState::new();
        assert_eq!(w.advance_auto(&scorer), Err(TraversalError::NotStarted));
        w.start(&scorer, 0).unwrap();
        assert_eq!(w.advance_to(&scorer, 3), Err(TraversalError::IllegalChoice(3)));
        w.advance_to(&scorer, 2).unwrap();
        assert_eq!(w.shots(), vec![0, 2]);
        assert_eq!(w.start(&scorer, 1), Err(TraversalError::AlreadyStarted));
    }

    #[test]
    fn start_must_be_first_tp_shot_when_known() {
        let g = MovieGraph::from_neighborhoods(3, vec![vec![(1, 1.0)], vec![(2, 1.0)], vec![]]).unwrap();
        let s = vec![SignedSentiment::default(); 3];
        let tp = TpSets::from_labels([vec![1], vec![], vec![], vec![], vec![]]);
        let c = semantic_only(3);
        let scorer = Scorer::new(&g, &s, &tp, &c).unwrap();
        let mut w = WalkState::new();
        assert_eq!(w.start(&scorer, 0), Err(TraversalError::InvalidStart(0)));
        w.start(&scorer, 1).unwrap();
        assert!(w.covered()[0]);
    }
}
