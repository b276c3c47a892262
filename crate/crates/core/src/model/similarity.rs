use serde::{Deserialize, Serialize};

use super::{ModelError, ShotRecord};
use crate::linalg::{cosine, dot, Matrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SimilarityMode {
    /// `tanh(W_i h_i + b_i) · tanh(W_j h_j + b_j) + b_ij`
    BilinearTanh,
    Cosine,
}

/// Projection weights for the bilinear-tanh similarity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BilinearWeights {
    pub w_source: Matrix,
    pub w_target: Matrix,
    pub b_source: Vec<f64>,
    pub b_target: Vec<f64>,
    pub b_pair: f64,
}

impl BilinearWeights {
    pub fn identity(dim: usize) -> Self {
        Self {
            w_source: Matrix::identity(dim),
            w_target: Matrix::identity(dim),
            b_source: vec![0.0; dim],
            b_target: vec![0.0; dim],
            b_pair: 0.0,
        }
    }

    pub fn dim(&self) -> usize {
        self.w_source.cols()
    }

    fn validate(&self) -> Result<(), ModelError> {
        let d = self.dim();
        let ok = self.w_source.shape() == (d, d)
            && self.w_target.shape() == (d, d)
            && self.b_source.len() == d
            && self.b_target.len() == d;
        if !ok {
            return Err(ModelError::InvalidParams(format!(
                "bilinear weights must be {d}x{d} matrices with {d}-vectors"
            )));
        }
        Ok(())
    }
}

/// How many future neighbours each node keeps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum KMode {
    Fixed { k: usize },
    /// Smallest option whose top-k transition mass reaches `theta`, else the largest option.
    MassCoverage { theta: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SimilarityParams {
    pub mode: SimilarityMode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<BilinearWeights>,
    /// Neighbourhood size options, kept sorted and deduplicated.
    pub k_options: Vec<usize>,
    pub k_mode: KMode,
}

impl Default for SimilarityParams {
    fn default() -> Self {
        Self {
            mode: SimilarityMode::Cosine,
            weights: None,
            k_options: (6..=12).collect(),
            k_mode: KMode::MassCoverage { theta: 0.5 },
        }
    }
}

impl SimilarityParams {
    pub fn cosine(k_options: Vec<usize>, k_mode: KMode) -> Self {
        Self {
            mode: SimilarityMode::Cosine,
            weights: None,
            k_options,
            k_mode,
        }
    }

    pub fn bilinear(weights: BilinearWeights, k_options: Vec<usize>, k_mode: KMode) -> Self {
        Self {
            mode: SimilarityMode::BilinearTanh,
            weights: Some(weights),
            k_options,
            k_mode,
        }
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if self.k_options.is_empty() || self.k_options.contains(&0) {
            return Err(ModelError::InvalidParams(
                "k_options must be non-empty and all >= 1".into(),
            ));
        }
        match self.k_mode {
            KMode::MassCoverage { theta } if !(theta > 0.0 && theta <= 1.0) => {
                return Err(ModelError::InvalidParams(format!(
                    "mass-coverage theta must be in (0, 1], got {theta}"
                )));
            }
            KMode::Fixed { k } if !self.k_options.contains(&k) => {
                return Err(ModelError::InvalidParams(format!(
                    "fixed k={k} is not one of the k_options"
                )));
            }
            _ => {}
        }
        match (&self.mode, &self.weights) {
            (SimilarityMode::BilinearTanh, None) => Err(ModelError::InvalidParams(
                "bilinear-tanh mode requires weights".into(),
            )),
            (SimilarityMode::BilinearTanh, Some(w)) => w.validate(),
            (SimilarityMode::Cosine, _) => Ok(()),
        }
    }

    /// Sorted, deduplicated options.
    pub fn sorted_options(&self) -> Vec<usize> {
        let mut o = self.k_options.clone();
        o.sort_unstable();
        o.dedup();
        o
    }
}

/// Raw pairwise similarity matrix `E` (not masked, not normalised).
pub fn build_similarity(
    shots: &[ShotRecord],
    params: &SimilarityParams,
) -> Result<Matrix, ModelError> {
    if shots.len() < 2 {
        return Err(ModelError::TooFewShots(shots.len()));
    }
    params.validate()?;
    let dim = match (&params.mode, &params.weights) {
        (SimilarityMode::BilinearTanh, Some(w)) => w.dim(),
        _ => shots[0].embedding.len(),
    };
    for (index, s) in shots.iter().enumerate() {
        if s.embedding.len() != dim {
            return Err(ModelError::DimensionMismatch {
                index,
                expected: dim,
                found: s.embedding.len(),
            });
        }
        if s.embedding.iter().any(|v| !v.is_finite()) {
            return Err(ModelError::NonFiniteEmbedding { index });
        }
    }

    let m = shots.len();
    let mut e = Matrix::zeros(m, m);
    match (&params.mode, &params.weights) {
        (SimilarityMode::Cosine, _) => {
            for i in 0..m {
                for j in 0..m {
                    e[(i, j)] = cosine(&shots[i].embedding, &shots[j].embedding);
                }
            }
        }
        (SimilarityMode::BilinearTanh, Some(w)) => {
            let project = |wm: &Matrix, b: &[f64], h: &[f64]| -> Vec<f64> {
                (0..dim)
                    .map(|r| (dot(wm.row(r), h) + b[r]).tanh())
                    .collect()
            };
            let src: Vec<Vec<f64>> = shots
                .iter()
                .map(|s| project(&w.w_source, &w.b_source, &s.embedding))
                .collect();
            let dst: Vec<Vec<f64>> = shots
                .iter()
                .map(|s| project(&w.w_target, &w.b_target, &s.embedding))
                .collect();
            for i in 0..m {
                for j in 0..m {
                    e[(i, j)] = dot(&src[i], &dst[j]) + w.b_pair;
                }
            }
        }
        (SimilarityMode::BilinearTanh, None) => unreachable!("validated above"),
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn shots(embs: &[&[f64]]) -> Vec<ShotRecord> {
        embs.iter()
            .enumerate()
            .map(|(i, e)| ShotRecord::new(i, i as f64, i as f64 + 1.0, e.to_vec()))
            .collect()
    }

    #[test]
    fn zero_weights_collapse_to_pair_bias() {
        let w = BilinearWeights {
            w_source: Matrix::zeros(2, 2),
            w_target: Matrix::zeros(2, 2),
            b_source: vec![0.0; 2],
            b_target: vec![0.0; 2],
            b_pair: 0.5,
        };
        let p = SimilarityParams::bilinear(w, vec![1], KMode::Fixed { k: 1 });
        let e = build_similarity(&shots(&[&[0.3, -2.0], &[1.0, 4.0], &[7.0, 0.1]]), &p).unwrap();
        assert!(e.as_slice().iter().all(|v| *v == 0.5));
    }

    #[test]
    fn cosine_identical_embeddings_give_one() {
        let p = SimilarityParams::cosine(vec![1], KMode::Fixed { k: 1 });
        let e = build_similarity(&shots(&[&[0.3, 0.4], &[0.3, 0.4]]), &p).unwrap();
        assert!((e[(0, 1)] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn identity_bilinear_on_orthogonal_axes() {
        let p = SimilarityParams::bilinear(BilinearWeights::identity(2), vec![1], KMode::Fixed { k: 1 });
        let e = build_similarity(&shots(&[&[1.0, 0.0], &[0.0, 1.0]]), &p).unwrap();
        // tanh(1)*tanh(0) + tanh(0)*tanh(1)
        assert_eq!(e[(0, 1)], 0.0);
        assert!((e[(0, 0)] - 1f64.tanh().powi(2)).abs() < 1e-15);
    }

    #[test]
    fn rejects_mismatch_and_non_finite_with_index() {
        let p = SimilarityParams::default();
        let err = build_similarity(&shots(&[&[1.0, 0.0], &[1.0]]), &p).unwrap_err();
        assert!(matches!(err, ModelError::DimensionMismatch { index: 1, .. }));
        let err = build_similarity(&shots(&[&[1.0, 0.0], &[f64::NAN, 0.0]]), &p).unwrap_err();
        assert_eq!(err, ModelError::NonFiniteEmbedding { index: 1 });
        let err = build_similarity(&shots(&[&[1.0]]), &p).unwrap_err();
        assert_eq!(err, ModelError::TooFewShots(1));
    }

    #[test]
    fn params_validation() {
        let mut p = SimilarityParams::default();
        p.validate().unwrap();
        p.k_options = vec![];
        assert!(p.validate().is_err());
        p.k_options = vec![0, 2];
        assert!(p.validate().is_err());
        let p = SimilarityParams::cosine(vec![2], KMode::MassCoverage { theta: 0.0 });
        assert!(p.validate().is_err());
        let p = SimilarityParams::cosine(vec![2], KMode::Fixed { k: 3 });
        assert!(p.validate().is_err());
        let p = SimilarityParams {
            mode: SimilarityMode::BilinearTanh,
            weights: None,
            k_options: vec![1],
            k_mode: KMode::Fixed { k: 1 },
        };
        assert!(p.validate().is_err());
    }
}
