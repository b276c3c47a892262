use serde::{Deserialize, Serialize};

use super::TraversalError;
use crate::model::FlowSchedule;

/// Criterion weights for the step score.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Lambdas {
    /// Transition probability (semantic similarity).
    pub semantic: f64,
    /// Temporal distance penalty.
    pub temporal: f64,
    /// Distance to the next turning point.
    pub narrative: f64,
    /// Deviation from the sentiment flow target.
    pub sentiment: f64,
}

impl Default for Lambdas {
    fn default() -> Self {
        Self {
            semantic: 1.0,
            temporal: 5.0,
            narrative: 10.0,
            sentiment: 10.0,
        }
    }
}

impl Lambdas {
    pub fn new(semantic: f64, temporal: f64, narrative: f64, sentiment: f64) -> Self {
        Self {
            semantic,
            temporal,
            narrative,
            sentiment,
        }
    }

    pub fn scaled(self, c: f64) -> Self {
        Self::new(self.semantic * c, self.temporal * c, self.narrative * c, self.sentiment * c)
    }

    fn fields(&self) -> [(&'static str, f64); 4] {
        [
            ("semantic", self.semantic),
            ("temporal", self.temporal),
            ("narrative", self.narrative),
            ("sentiment", self.sentiment),
        ]
    }
}

/// Deduction for candidates close (in hops) to the last two turning points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpoilerPenalty {
    pub weight: f64,
    /// Hop radius beyond which no penalty applies.
    pub horizon: usize,
}

/// What the sentiment criterion compares against the flow target.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SentimentTerm {
    /// `|intensity(j) − f_k|`
    #[default]
    TargetIntensity,
    /// `| |intensity(j) − intensity(i)| − f_k |`
    IntensityChange,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlowShape {
    pub base: f64,
    pub ramp: f64,
    pub cap: f64,
}

impl Default for FlowShape {
    fn default() -> Self {
        let s = FlowSchedule::default();
        Self {
            base: s.base,
            ramp: s.ramp,
            cap: s.cap,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TraversalConfig {
    pub lambdas: Lambdas,
    /// Shots per proposal, including the start shot.
    pub budget: usize,
    /// Number of proposals (and of start shots considered).
    pub proposals: usize,
    pub flow: FlowShape,
    /// Keep walking after every turning point is covered.
    pub fill_to_budget: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spoiler_penalty: Option<SpoilerPenalty>,
    pub sentiment_term: SentimentTerm,
    /// Seeds start sampling when no turning-point scores are available.
    pub rng_seed: u64,
}

impl Default for TraversalConfig {
    fn default() -> Self {
        Self {
            lambdas: Lambdas::default(),
            budget: 10,
            proposals: 5,
            flow: FlowShape::default(),
            fill_to_budget: true,
            spoiler_penalty: None,
            sentiment_term: SentimentTerm::TargetIntensity,
            rng_seed: 0,
        }
    }
}

impl TraversalConfig {
    pub fn schedule(&self) -> FlowSchedule {
        FlowSchedule {
            budget: self.budget,
            base: self.flow.base,
            ramp: self.flow.ramp,
            cap: self.flow.cap,
        }
    }

    pub fn validate(&self) -> Result<(), TraversalError> {
        for (name, v) in self.lambdas.fields() {
            if !(v.is_finite() && v >= 0.0) {
                return Err(TraversalError::InvalidConfig {
                    field: format!("lambdas.{name}"),
                    reason: format!("must be finite and >= 0, got {v}"),
                });
            }
        }
        if self.budget == 0 {
            return Err(invalid("budget", "must be >= 1"));
        }
        if self.proposals == 0 {
            return Err(invalid("proposals", "must be >= 1"));
        }
        let f = &self.flow;
        if !(0.0 <= f.base && f.base <= f.cap && f.cap <= 1.0) {
            return Err(invalid("flow", "need 0 <= base <= cap <= 1"));
        }
        if !(f.ramp.is_finite() && f.ramp >= 0.0) {
            return Err(invalid("flow.ramp", "must be >= 0"));
        }
        if let Some(p) = &self.spoiler_penalty {
            if !(p.weight.is_finite() && p.weight >= 0.0) {
                return Err(invalid("spoiler_penalty.weight", "must be finite and >= 0"));
            }
            if p.horizon == 0 {
                return Err(invalid("spoiler_penalty.horizon", "must be >= 1"));
            }
        }
        Ok(())
    }
}

fn invalid(field: &str, reason: &str) -> TraversalError {
    TraversalError::InvalidConfig {
        field: field.to_string(),
        reason: reason.to_string(),
    }
}
