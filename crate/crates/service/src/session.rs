//! One interactive walk: start choice, greedy or manual steps, undo.

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use trailer_core::pipeline::PreparedMovie;
use trailer_core::traversal::{degenerate_starts, Scorer, Termination, TrailerPath, TraversalConfig, WalkState};

use crate::error::ApiError;

/// A step request: a shot id or `"auto"`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Choice {
    Shot(usize),
    Auto(AutoTag),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AutoTag {
    Auto,
}

impl Choice {
    pub const AUTO: Choice = Choice::Auto(AutoTag::Auto);
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StartCandidate {
    pub shot: usize,
    /// First-turning-point score; absent for sampled starts.
    pub tp_score: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub thumbnail_ref: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StepCandidate {
    pub shot: usize,
    pub semantic: f64,
    pub temporal: f64,
    pub narrative: f64,
    pub sentiment: f64,
    pub spoiler: f64,
    /// Signed weighted terms (semantic, temporal, narrative, sentiment, spoiler); they add up to `total`.
    pub contributions: [f64; 5],
    pub total: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub thumbnail_ref: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "phase", rename_all = "kebab-case")]
pub enum Candidates {
    Start { candidates: Vec<StartCandidate> },
    Step {
        /// 1-based position the chosen shot will take.
        step: usize,
        flow_target: f64,
        candidates: Vec<StepCandidate>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PathView {
    pub session_id: String,
    pub movie_id: String,
    pub config: TraversalConfig,
    pub path: Option<TrailerPath>,
    pub flow_targets: Vec<f64>,
    pub finished: Option<Termination>,
    pub history_depth: usize,
}

#[derive(Debug, Clone)]
pub struct Session {
    pub id: String,
    pub movie: Arc<PreparedMovie>,
    pub config: TraversalConfig,
    walk: WalkState,
    history: Vec<WalkState>,
}

impl Session {
    /// Fails on an invalid config.
    pub fn new(id: String, movie: Arc<PreparedMovie>, config: TraversalConfig) -> Result<Self, ApiError> {
        movie.scorer(&config)?;
        Ok(Self {
            id,
            movie,
            config,
            walk: WalkState::new(),
            history: Vec::new(),
        })
    }

    fn scorer(&self) -> Scorer<'_> {
        self.movie.scorer(&self.config).expect("config validated at creation")
    }

    pub fn walk(&self) -> &WalkState {
        &self.walk
    }

    pub fn history_depth(&self) -> usize {
        self.history.len()
    }

    fn thumb(&self, shot: usize) -> Option<String> {
        self.movie.bundle.shots[shot].thumbnail_ref.clone()
    }

    /// Start shots in preference order: top first-turning-point shots, or
    /// seeded samples when the movie has no turning-point scores.
    pub fn start_candidates(&self) -> Vec<StartCandidate> {
        let tps = &self.movie.tp_sets;
        if tps.is_degenerate() {
            degenerate_starts(self.movie.graph.n_shots(), self.config.proposals, self.config.rng_seed)
                .into_iter()
                .map(|shot| StartCandidate {
                    shot,
                    tp_score: None,
                    thumbnail_ref: self.thumb(shot),
                })
                .collect()
        } else {
            tps.starts(self.config.proposals)
                .into_iter()
                .map(|m| StartCandidate {
                    shot: m.shot,
                    tp_score: Some(m.score),
                    thumbnail_ref: self.thumb(m.shot),
                })
                .collect()
        }
    }

    pub fn candidates(&self) -> Result<Candidates, ApiError> {
        if self.walk.is_empty() {
            return Ok(Candidates::Start {
                candidates: self.start_candidates(),
            });
        }
        if let Some(reason) = self.walk.finished() {
            return Err(ApiError::conflict("finished", format!("walk finished ({reason:?}); undo to continue")));
        }
        let scorer = self.scorer();
        let list = self.walk.candidates(&scorer)?;
        if list.is_empty() {
            return Err(ApiError::conflict(
                "dead-end",
                "no legal candidates from the current shot; step with \"auto\" to backtrack, or undo",
            ));
        }
        let step = self.walk.len() + 1;
        Ok(Candidates::Step {
            step,
            flow_target: scorer.flow_target(step),
            candidates: list
                .into_iter()
                .map(|c| StepCandidate {
                    shot: c.shot,
                    semantic: c.score.semantic,
                    temporal: c.score.temporal,
                    narrative: c.score.narrative,
                    sentiment: c.score.sentiment,
                    spoiler: c.score.spoiler,
                    contributions: c.score.contributions(&self.config),
                    total: c.score.total,
                    thumbnail_ref: self.thumb(c.shot),
                })
                .collect(),
        })
    }

    pub fn step(&mut self, choice: Choice) -> Result<(), ApiError> {
        let scorer = self.movie.scorer(&self.config)?;
        let mut next = self.walk.clone();
        if next.is_empty() {
            let starts = self.start_candidates();
            let shot = match choice {
                Choice::Auto(_) => starts.first().map(|c| c.shot).ok_or_else(|| {
                    ApiError::conflict("no-starts", "movie has no start candidates")
                })?,
                Choice::Shot(s) if starts.iter().any(|c| c.shot == s) => s,
                Choice::Shot(s) => {
                    return Err(ApiError::unprocessable("illegal-choice", format!("shot {s} is not a start candidate"))
                        .with_field("choice"))
                }
            };
            next.start(&scorer, shot)?;
        } else {
            match choice {
                Choice::Auto(_) => next.advance_auto(&scorer)?,
                Choice::Shot(s) => next.advance_to(&scorer, s)?,
            }
        }
        self.history.push(std::mem::replace(&mut self.walk, next));
        Ok(())
    }

    pub fn undo(&mut self) -> Result<(), ApiError> {
        match self.history.pop() {
            Some(prev) => {
                self.walk = prev;
                Ok(())
            }
            None => Err(ApiError::conflict("nothing-to-undo", "no steps to undo")),
        }
    }

    pub fn view(&self) -> PathView {
        PathView {
            session_id: self.id.clone(),
            movie_id: self.movie.bundle.movie_id.clone(),
            config: self.config.clone(),
            path: self.walk.to_path().ok(),
            flow_targets: self.scorer().flow_targets().to_vec(),
            finished: self.walk.finished(),
            history_depth: self.history.len(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use trailer_core::ingest::synthetic_bundle;
    use trailer_core::traversal::traverse;
    use trailer_core::EngineConfig;

    fn session(n: usize, seed: u64) -> Session {
        let cfg = EngineConfig::default();
        let movie = Arc::new(PreparedMovie::new(synthetic_bundle("m", n, 8, seed), &cfg).unwrap());
        Session::new("s1".into(), movie, cfg.traversal).unwrap()
    }

    #[test]
    fn choice_parses_ids_and_auto() {
        assert_eq!(serde_json::from_str::<Choice>("3").unwrap(), Choice::Shot(3));
        assert_eq!(serde_json::from_str::<Choice>("\"auto\"").unwrap(), Choice::AUTO);
        assert!(serde_json::from_str::<Choice>("\"next\"").is_err());
    }

    #[test]
    fn auto_session_matches_batch() {
        for seed in 0..5 {
            let mut s = session(60, seed);
            while s.walk().finished().is_none() {
                s.step(Choice::AUTO).unwrap();
            }
            let start = s.start_candidates()[0].shot;
            let batch = traverse(&s.movie.scorer(&s.config).unwrap(), start).unwrap();
            assert_eq!(s.view().path.unwrap(), batch);
        }
    }

    #[test]
    fn undo_restores_exact_state() {
        let mut s = session(40, 9);
        s.step(Choice::AUTO).unwrap();
        s.step(Choice::AUTO).unwrap();
        let before = serde_json::to_string(&s.view()).unwrap();
        s.step(Choice::AUTO).unwrap();
        s.undo().unwrap();
        assert_eq!(serde_json::to_string(&s.view()).unwrap(), before);
        s.undo().unwrap();
        s.undo().unwrap();
        assert!(s.walk().is_empty());
        assert_eq!(s.undo().unwrap_err().body.code, "nothing-to-undo");
    }

    #[test]
    fn illegal_choice_leaves_state_alone() {
        let mut s = session(40, 2);
        s.step(Choice::AUTO).unwrap();
        let before = serde_json::to_string(&s.view()).unwrap();
        let err = s.step(Choice::Shot(0)).unwrap_err();
        assert_eq!((err.status.as_u16(), err.body.code), (422, "illegal-choice"));
        assert_eq!(serde_json::to_string(&s.view()).unwrap(), before);
    }
}
