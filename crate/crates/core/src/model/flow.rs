use serde::{Deserialize, Serialize};

use super::ModelError;

/// Target sentiment intensity per trailer position: medium, then flat, then rising.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlowSchedule {
    pub budget: usize,
    #[serde(default = "default_base")]
    pub base: f64,
    #[serde(default = "default_ramp")]
    pub ramp: f64,
    #[serde(default = "default_cap")]
    pub cap: f64,
}

fn default_base() -> f64 {
    0.7
}
fn default_ramp() -> f64 {
    0.1
}
fn default_cap() -> f64 {
    1.0
}

impl Default for FlowSchedule {
    fn default() -> Self {
        Self::with_budget(10)
    }
}

impl FlowSchedule {
    pub fn with_budget(budget: usize) -> Self {
        Self {
            budget,
            base: default_base(),
            ramp: default_ramp(),
            cap: default_cap(),
        }
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if self.budget < 3 {
            return Err(ModelError::InvalidSchedule(format!(
                "budget must be >= 3, got {}",
                self.budget
            )));
        }
        if !(0.0 <= self.base && self.base <= self.cap && self.cap <= 1.0) {
            return Err(ModelError::InvalidSchedule(
                "need 0 <= base <= cap <= 1".into(),
            ));
        }
        if !(self.ramp >= 0.0 && self.ramp.is_finite()) {
            return Err(ModelError::InvalidSchedule("ramp must be >= 0".into()));
        }
        Ok(())
    }
}

/// Section sizes `(⌊L/3⌋, ⌊L/3⌋, L − 2⌊L/3⌋)`.
pub fn section_sizes(len: usize) -> [usize; 3] {
    let third = len / 3;
    [third, third, len - 2 * third]
}

/// Target intensity `f_k` for 1-based position `k`.
pub fn flow_target(k: usize, schedule: &FlowSchedule) -> Result<f64, ModelError> {
    let budget = schedule.budget;
    if k == 0 || k > budget {
        return Err(ModelError::StepOutOfRange { k, budget });
    }
    let [first, second, _] = section_sizes(budget);
    let idx = k - 1;
    let f = if idx < first {
        schedule.base
    } else if idx < first + second {
        0.0
    } else {
        let offset = (idx - first - second) as f64;
        snap(schedule.base + schedule.ramp * offset).min(schedule.cap)
    };
    Ok(f)
}

/// The whole target series `f_1..f_L`.
pub fn flow_targets(schedule: &FlowSchedule) -> Vec<f64> {
    (1..=schedule.budget)
        .map(|k| flow_target(k, schedule).expect("k within budget"))
        .collect()
}

// Removes accumulation noise such as 0.7 + 0.1 = 0.7999999999999999.
fn snap(x: f64) -> f64 {
    (x * 1e12).round() / 1e12
}
