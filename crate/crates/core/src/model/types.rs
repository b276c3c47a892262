use serde::{Deserialize, Serialize};

use super::ModelError;

/// Number of turning points in a movie.
pub const NUM_TPS: usize = 5;

/// Sentiment tolerance for simplex membership.
pub const SIMPLEX_TOL: f64 = 1e-6;

/// One movie shot as delivered by the upstream feature pipeline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShotRecord {
    /// 0-based position in movie order.
    pub id: usize,
    pub start_s: f64,
    pub end_s: f64,
    pub embedding: Vec<f64>,
    /// Distribution over (negative, neutral, positive).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sentiment: Option<[f64; 3]>,
    /// Per-TP probabilities, one per turning point.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tp_scores: Option<[f64; NUM_TPS]>,
    /// Silver trailer label.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub is_trailer: Option<bool>,
    /// Opaque reference handed through to clients (e.g. a thumbnail URL).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub thumbnail_ref: Option<String>,
}

impl ShotRecord {
    pub fn new(id: usize, start_s: f64, end_s: f64, embedding: Vec<f64>) -> Self {
        Self {
            id,
            start_s,
            end_s,
            embedding,
            sentiment: None,
            tp_scores: None,
            is_trailer: None,
            thumbnail_ref: None,
        }
    }

    /// Checks the per-shot invariants. `dim` is the movie-wide embedding size.
    pub fn validate(&self, dim: usize) -> Result<(), ModelError> {
        let id = self.id;
        if self.end_s.partial_cmp(&self.start_s) != Some(std::cmp::Ordering::Greater) {
            return Err(ModelError::InvalidShot {
                id,
                reason: format!("end_s ({}) must exceed start_s ({})", self.end_s, self.start_s),
            });
        }
        if self.embedding.len() != dim {
            return Err(ModelError::DimensionMismatch {
                index: id,
                expected: dim,
                found: self.embedding.len(),
            });
        }
        if self.embedding.iter().any(|v| !v.is_finite()) {
            return Err(ModelError::NonFiniteEmbedding { index: id });
        }
        if let Some(s) = &self.sentiment {
            check_simplex(s).map_err(|reason| ModelError::InvalidShot { id, reason })?;
        }
        if let Some(tp) = &self.tp_scores {
            if tp.iter().any(|p| !(0.0..=1.0).contains(p)) {
                return Err(ModelError::InvalidShot {
                    id,
                    reason: "tp_scores must lie in [0, 1]".into(),
                });
            }
        }
        Ok(())
    }

    /// Signed sentiment of the shot; shots without a distribution are neutral.
    pub fn signed_sentiment(&self) -> SignedSentiment {
        self.sentiment
            .map(SignedSentiment::from_distribution)
            .unwrap_or_default()
    }
}

fn check_simplex(s: &[f64; 3]) -> Result<(), String> {
    if s.iter().any(|p| !p.is_finite() || *p < 0.0) {
        return Err("sentiment components must be non-negative".into());
    }
    let sum: f64 = s.iter().sum();
    if (sum - 1.0).abs() > SIMPLEX_TOL {
        return Err(format!("sentiment must sum to 1 (got {sum})"));
    }
    Ok(())
}

/// P(positive) − P(negative), in [−1, 1].
#[derive(Debug, Clone, Copy, Default, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SignedSentiment(f64);

impl SignedSentiment {
    pub fn new(value: f64) -> Option<Self> {
        (value.is_finite() && value.abs() <= 1.0).then_some(Self(value))
    }

    /// `dist` is (negative, neutral, positive).
    pub fn from_distribution(dist: [f64; 3]) -> Self {
        Self((dist[2] - dist[0]).clamp(-1.0, 1.0))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn intensity(self) -> f64 {
        self.0.abs()
    }
}
