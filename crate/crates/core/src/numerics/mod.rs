//! Loss formulas of the two-network training regime, evaluated forward with
//! analytic gradients. Nothing here trains; the functions exist so the
//! formulas can be verified and reused.

mod bidaf;
mod contrastive;
mod cpc;
mod kl;
mod pooling;

pub use bidaf::{bidaf_fuse, bidaf_fuse_backward, bidaf_weighted_sum, Modalities};
pub use contrastive::{info_nce, nce_representation, scaled_dot, ContrastiveBatch};
pub use cpc::{cpc_walk_representation, WalkRepresentation, DEFAULT_WALK_STEPS};
pub use kl::{kl_divergence, kl_prediction_consistency, kl_rowwise_sum, kl_teacher, NORMALIZATION_TOL};
pub use pooling::{max_pool_scenes, mean_pool_scenes};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::Matrix;
use crate::model::ModelError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NumericsError {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("temperature must be > 0, got {0}")]
    Temperature(f64),
    #[error("need at least {min} rows, got {found}")]
    TooFewRows { min: usize, found: usize },
    #[error("non-finite input in {0}")]
    NonFinite(&'static str),
    #[error("negative probability in {0}")]
    NegativeProbability(&'static str),
    #[error("row {row} of {name} sums to {sum}, expected 1")]
    NotNormalized { name: &'static str, row: usize, sum: f64 },
    #[error("distribution {row} has zero mass after pooling")]
    ZeroMass { row: usize },
    #[error("row {row}, entry {index}: reference has zero mass where the model does not")]
    SupportViolation { row: usize, index: usize },
    #[error("shot {shot} maps to scene {scene}, but there are only {n_scenes} scenes")]
    BadMapping { shot: usize, scene: usize, n_scenes: usize },
    #[error("scene {0} has no shots")]
    EmptyScene(usize),
    #[error(transparent)]
    Graph(#[from] ModelError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Gradient {
    pub name: String,
    pub values: Matrix,
}

/// Loss value with one gradient per differentiable input, shaped like that input.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LossReport {
    pub value: f64,
    pub gradients: Vec<Gradient>,
}

impl LossReport {
    pub fn gradient(&self, name: &str) -> Option<&Matrix> {
        self.gradients.iter().find(|g| g.name == name).map(|g| &g.values)
    }

    fn new(value: f64, gradients: Vec<(&str, Matrix)>) -> Self {
        Self {
            value,
            gradients: gradients
                .into_iter()
                .map(|(name, values)| Gradient {
                    name: name.to_string(),
                    values,
                })
                .collect(),
        }
    }
}

/// Weights of the consistency terms in the joint objective.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JointWeights {
    /// Prediction-consistency weight.
    pub a: f64,
    /// Representation-consistency weight.
    pub b: f64,
}

impl Default for JointWeights {
    fn default() -> Self {
        Self { a: 10.0, b: 0.03 }
    }
}

/// `S + V + a·P + b·R`.
pub fn joint_loss(screenplay: f64, video: f64, prediction: f64, representation: f64, w: JointWeights) -> f64 {
    screenplay + video + w.a * prediction + w.b * representation
}

fn check_finite(m: &Matrix, name: &'static str) -> Result<(), NumericsError> {
    if m.is_finite() {
        Ok(())
    } else {
        Err(NumericsError::NonFinite(name))
    }
}

#[cfg(test)]
pub(crate) mod testutil {
    use crate::linalg::Matrix;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    pub fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    pub fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Matrix {
        let data = (0..rows * cols).map(|_| rng.gen_range(-1.0..1.0)).collect();
        Matrix::from_vec(rows, cols, data).unwrap()
    }

    /// Central differences of `f` at `x`, one entry at a time.
    pub fn numeric_grad(x: &Matrix, h: f64, mut f: impl FnMut(&Matrix) -> f64) -> Matrix {
        let mut g = Matrix::zeros(x.rows(), x.cols());
        let mut probe = x.clone();
        for idx in 0..x.as_slice().len() {
            let orig = probe.as_slice()[idx];
            probe.as_mut_slice()[idx] = orig + h;
            let up = f(&probe);
            probe.as_mut_slice()[idx] = orig - h;
            let down = f(&probe);
            probe.as_mut_slice()[idx] = orig;
            g.as_mut_slice()[idx] = (up - down) / (2.0 * h);
        }
        g
    }

    pub fn max_rel_err(analytic: &Matrix, numeric: &Matrix) -> f64 {
        analytic
            .as_slice()
            .iter()
            .zip(numeric.as_slice())
            .map(|(a, n)| (a - n).abs() / a.abs().max(n.abs()).max(1e-3))
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn joint_loss_fixtures() {
        let w = JointWeights::default();
        assert_eq!(joint_loss(0.0, 0.0, 0.0, 0.0, w), 0.0);
        assert!((joint_loss(1.0, 1.0, 1.0, 1.0, w) - 12.03).abs() < 1e-12);
        let any = JointWeights { a: 3.3, b: -7.0 };
        assert_eq!(joint_loss(2.0, 3.0, 0.0, 0.0, any), 5.0);
    }

    #[test]
    fn joint_loss_superposition() {
        let w = JointWeights { a: 2.5, b: 0.4 };
        let x = [0.3, -1.2, 4.0, 0.7];
        let y = [1.1, 0.5, -2.0, 3.0];
        let sum: Vec<f64> = x.iter().zip(&y).map(|(a, b)| a + b).collect();
        let lhs = joint_loss(sum[0], sum[1], sum[2], sum[3], w);
        let rhs = joint_loss(x[0], x[1], x[2], x[3], w) + joint_loss(y[0], y[1], y[2], y[3], w);
        assert!((lhs - rhs).abs() < 1e-12);
        let scaled = joint_loss(3.0 * x[0], 3.0 * x[1], 3.0 * x[2], 3.0 * x[3], w);
        assert!((scaled - 3.0 * joint_loss(x[0], x[1], x[2], x[3], w)).abs() < 1e-12);
    }
}
