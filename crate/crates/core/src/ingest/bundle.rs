use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::canonical::to_canonical_json;
use super::IngestError;
use crate::model::{ShotRecord, SignedSentiment, NUM_TPS, SIMPLEX_TOL};
use crate::traversal::TpSets;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneRecord {
    pub id: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub sentences: Vec<Vec<f64>>,
    /// Which turning points this scene was labelled with.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tp_flags: Option<[bool; NUM_TPS]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sentiment: Option<[f64; 3]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrailerShot {
    pub embedding: Vec<f64>,
    pub duration_s: f64,
}

/// Everything the engine knows about one movie.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MovieBundle {
    pub movie_id: String,
    pub dim: usize,
    pub shots: Vec<ShotRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scenes: Option<Vec<SceneRecord>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shot_to_scene: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trailer_shots: Option<Vec<TrailerShot>>,
    /// Gold shot ids per turning point, for evaluation.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tp_gold: Option<[Vec<usize>; NUM_TPS]>,
    /// Shot-id sets of the movie's official trailers.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trailers: Option<Vec<Vec<usize>>>,
    /// Free-form provenance (filters applied upstream and the like).
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl MovieBundle {
    pub fn new(movie_id: impl Into<String>, dim: usize, shots: Vec<ShotRecord>) -> Self {
        Self {
            movie_id: movie_id.into(),
            dim,
            shots,
            scenes: None,
            shot_to_scene: None,
            trailer_shots: None,
            tp_gold: None,
            trailers: None,
            notes: Vec::new(),
        }
    }

    pub fn n_shots(&self) -> usize {
        self.shots.len()
    }

    pub fn validate(&self) -> Result<(), IngestError> {
        if self.movie_id.trim().is_empty() {
            return Err(IngestError::invalid("movie_id", "must not be empty"));
        }
        if self.dim == 0 {
            return Err(IngestError::invalid("dim", "must be at least 1"));
        }
        if self.shots.is_empty() {
            return Err(IngestError::invalid("shots", "must not be empty"));
        }
        for (position, shot) in self.shots.iter().enumerate() {
            if shot.id != position {
                return Err(IngestError::NonContiguous { position, found: shot.id });
            }
            if let Err(e) = shot.validate(self.dim) {
                return Err(IngestError::invalid(format!("shots[{position}]"), e.to_string()));
            }
        }
        if let Some(i) = (1..self.shots.len()).find(|&i| self.shots[i].start_s < self.shots[i - 1].start_s) {
            return Err(IngestError::invalid(format!("shots[{i}].start_s"), "shots must be in temporal order"));
        }
        self.validate_scenes()?;
        if let Some(trailer) = &self.trailer_shots {
            for (i, t) in trailer.iter().enumerate() {
                if t.embedding.len() != self.dim {
                    return Err(IngestError::Dimension {
                        field: format!("trailer_shots[{i}].embedding"),
                        expected: self.dim,
                        found: t.embedding.len(),
                    });
                }
                if t.embedding.iter().any(|x| !x.is_finite()) || t.duration_s.is_nan() || t.duration_s < 0.0 {
                    return Err(IngestError::invalid(format!("trailer_shots[{i}]"), "non-finite or negative values"));
                }
            }
        }
        let n = self.n_shots();
        if let Some(gold) = &self.tp_gold {
            for (t, set) in gold.iter().enumerate() {
                if let Some(&s) = set.iter().find(|&&s| s >= n) {
                    return Err(IngestError::invalid(format!("tp_gold[{t}]"), format!("shot {s} out of range")));
                }
            }
        }
        if let Some(trailers) = &self.trailers {
            for (t, set) in trailers.iter().enumerate() {
                if let Some(&s) = set.iter().find(|&&s| s >= n) {
                    return Err(IngestError::invalid(format!("trailers[{t}]"), format!("shot {s} out of range")));
                }
            }
        }
        Ok(())
    }

    fn validate_scenes(&self) -> Result<(), IngestError> {
        if let Some(scenes) = &self.scenes {
            for (i, s) in scenes.iter().enumerate() {
                if s.id != i {
                    return Err(IngestError::invalid(format!("scenes[{i}].id"), format!("expected {i}, found {}", s.id)));
                }
                if s.sentences.iter().flatten().any(|x| !x.is_finite()) {
                    return Err(IngestError::invalid(format!("scenes[{i}].sentences"), "non-finite value"));
                }
                if let Some(d) = s.sentiment {
                    let sum: f64 = d.iter().sum();
                    if d.iter().any(|p| p.is_nan() || *p < 0.0) || (sum - 1.0).abs() > SIMPLEX_TOL {
                        return Err(IngestError::invalid(format!("scenes[{i}].sentiment"), "must be a distribution"));
                    }
                }
            }
        }
        let Some(map) = &self.shot_to_scene else {
            return Ok(());
        };
        if map.len() != self.n_shots() {
            return Err(IngestError::invalid(
                "shot_to_scene",
                format!("covers {} shots, bundle has {}", map.len(), self.n_shots()),
            ));
        }
        if map[0] != 0 {
            return Err(IngestError::NonMonotone { shot: 0 });
        }
        if let Some(i) = (1..map.len()).find(|&i| map[i] < map[i - 1] || map[i] > map[i - 1] + 1) {
            return Err(IngestError::NonMonotone { shot: i });
        }
        if let Some(scenes) = &self.scenes {
            let used = map[map.len() - 1] + 1;
            if used != scenes.len() {
                return Err(IngestError::invalid(
                    "shot_to_scene",
                    format!("spans {used} scenes, bundle lists {}", scenes.len()),
                ));
            }
        }
        Ok(())
    }

    pub fn embeddings(&self) -> Vec<&[f64]> {
        self.shots.iter().map(|s| s.embedding.as_slice()).collect()
    }

    pub fn sentiments(&self) -> Vec<SignedSentiment> {
        self.shots.iter().map(ShotRecord::signed_sentiment).collect()
    }

    pub fn has_tp_scores(&self) -> bool {
        self.shots.iter().all(|s| s.tp_scores.is_some())
    }

    /// Turning-point sets from shot scores; empty when scores are absent.
    pub fn tp_sets(&self, per_tp: usize) -> TpSets {
        if self.has_tp_scores() {
            TpSets::from_scores(&self.shots, per_tp)
        } else {
            TpSets::empty()
        }
    }

    /// Silver labels when every shot carries one.
    pub fn trailer_labels(&self) -> Option<Vec<bool>> {
        self.shots.iter().map(|s| s.is_trailer).collect()
    }

    /// Shot ids per turning point from the scene labels, through `shot_to_scene`.
    pub fn projected_tp_shots(&self) -> Result<Option<[Vec<usize>; NUM_TPS]>, IngestError> {
        let (Some(scenes), Some(map)) = (&self.scenes, &self.shot_to_scene) else {
            return Ok(None);
        };
        let flags: Option<Vec<[bool; NUM_TPS]>> = scenes.iter().map(|s| s.tp_flags).collect();
        let Some(flags) = flags else {
            return Ok(None);
        };
        let per_shot = super::project_scene_labels(&flags, map)?;
        let mut out: [Vec<usize>; NUM_TPS] = Default::default();
        for (shot, f) in per_shot.iter().enumerate() {
            for t in 0..NUM_TPS {
                if f[t] {
                    out[t].push(shot);
                }
            }
        }
        Ok(Some(out))
    }
}

/// Parses and validates bundle JSON. Schema errors carry the offending field path.
pub fn parse_bundle(json: &str) -> Result<MovieBundle, IngestError> {
    let de = &mut serde_json::Deserializer::from_str(json);
    let bundle: MovieBundle = serde_path_to_error::deserialize(de).map_err(|e| IngestError::Schema {
        field: e.path().to_string(),
        message: e.inner().to_string(),
    })?;
    bundle.validate()?;
    Ok(bundle)
}

pub fn load_bundle(path: impl AsRef<Path>) -> Result<MovieBundle, IngestError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| IngestError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_bundle(&text)
}

/// Writes the canonical form: sorted keys, 17-digit floats.
pub fn save_bundle(bundle: &MovieBundle, path: impl AsRef<Path>) -> Result<(), IngestError> {
    bundle.validate()?;
    let path = path.as_ref();
    let text = to_canonical_json(bundle).map_err(|e| IngestError::invalid("bundle", e.to_string()))?;
    fs::write(path, text).map_err(|source| IngestError::Io {
        path: path.to_path_buf(),
        source,
    })
}
