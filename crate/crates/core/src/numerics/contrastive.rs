use serde::{Deserialize, Serialize};

use super::{check_finite, LossReport, NumericsError};
use crate::linalg::{dot, log_sum_exp, softmax_in_place, Matrix};

/// `x·y / √D`.
pub fn scaled_dot(x: &[f64], y: &[f64]) -> f64 {
    dot(x, y) / (x.len() as f64).sqrt()
}

/// Paired anchors and positives for the in-batch contrastive loss.
/// Row `j` of `positives` is the positive for row `j` of `anchors`; every
/// other row is a negative.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContrastiveBatch {
    pub anchors: Matrix,
    pub positives: Matrix,
    pub temperature: f64,
}

impl ContrastiveBatch {
    pub fn new(anchors: Matrix, positives: Matrix, temperature: f64) -> Result<Self, NumericsError> {
        if !temperature.is_finite() || temperature <= 0.0 {
            return Err(NumericsError::Temperature(temperature));
        }
        if anchors.shape() != positives.shape() {
            return Err(NumericsError::Shape(format!(
                "anchors {:?} vs positives {:?}",
                anchors.shape(),
                positives.shape()
            )));
        }
        if anchors.rows() < 2 {
            return Err(NumericsError::TooFewRows { min: 2, found: anchors.rows() });
        }
        if anchors.cols() == 0 {
            return Err(NumericsError::Shape("representations must have D >= 1".into()));
        }
        check_finite(&anchors, "anchors")?;
        check_finite(&positives, "positives")?;
        Ok(Self { anchors, positives, temperature })
    }

    fn scale(&self) -> f64 {
        (self.anchors.cols() as f64).sqrt() * self.temperature
    }

    /// `−(1/N) Σ_j log softmax_k(s(anchor_j, positive_k)/τ)[j]` with gradients
    /// `"anchors"` and `"positives"`.
    pub fn loss(&self) -> LossReport {
        let (value, d_anchor, d_positive) = self.forward_backward();
        LossReport::new(value, vec![("anchors", d_anchor), ("positives", d_positive)])
    }

    fn forward_backward(&self) -> (f64, Matrix, Matrix) {
        let n = self.anchors.rows();
        let c = self.scale();
        let logits = self.anchors.matmul_t(&self.positives).scale(1.0 / c);
        let mut value = 0.0;
        let mut g = Matrix::zeros(n, n);
        for j in 0..n {
            let row = logits.row(j);
            value += log_sum_exp(row) - row[j];
            let mut p = row.to_vec();
            softmax_in_place(&mut p);
            p[j] -= 1.0;
            for (o, x) in g.row_mut(j).iter_mut().zip(p) {
                *o = x / n as f64;
            }
        }
        let d_anchor = g.matmul(&self.positives).scale(1.0 / c);
        let d_positive = g.transpose().matmul(&self.anchors).scale(1.0 / c);
        (value / n as f64, d_anchor, d_positive)
    }
}

/// Representation-consistency loss between scene representations `s_j` and
/// pooled shot representations `h̄_j` (both N×D). Gradients are named
/// `"scene_reps"` and `"shot_reps"`.
pub fn nce_representation(scene_reps: &Matrix, shot_reps: &Matrix, temperature: f64) -> Result<LossReport, NumericsError> {
    let batch = ContrastiveBatch::new(shot_reps.clone(), scene_reps.clone(), temperature)?;
    let (value, shots, scenes) = batch.forward_backward();
    Ok(LossReport::new(value, vec![("scene_reps", scenes), ("shot_reps", shots)]))
}

/// InfoNCE of one anchor against its positive and `K ≥ 1` negatives (rows of
/// `negatives`). Gradients: `"anchor"` (1×D), `"positive"` (1×D), `"negatives"` (K×D).
pub fn info_nce(anchor: &[f64], positive: &[f64], negatives: &Matrix, temperature: f64) -> Result<LossReport, NumericsError> {
    if !temperature.is_finite() || temperature <= 0.0 {
        return Err(NumericsError::Temperature(temperature));
    }
    let d = anchor.len();
    if d == 0 || positive.len() != d || negatives.cols() != d {
        return Err(NumericsError::Shape(format!(
            "anchor D={d}, positive D={}, negatives D={}",
            positive.len(),
            negatives.cols()
        )));
    }
    if negatives.rows() == 0 {
        return Err(NumericsError::TooFewRows { min: 1, found: 0 });
    }
    if anchor.iter().chain(positive).any(|x| !x.is_finite()) {
        return Err(NumericsError::NonFinite("anchor/positive"));
    }
    check_finite(negatives, "negatives")?;

    let c = (d as f64).sqrt() * temperature;
    let k = negatives.rows();
    let mut logits = Vec::with_capacity(k + 1);
    logits.push(dot(anchor, positive) / c);
    for r in 0..k {
        logits.push(dot(anchor, negatives.row(r)) / c);
    }
    let value = log_sum_exp(&logits) - logits[0];
    let mut p = logits;
    softmax_in_place(&mut p);

    let mut d_anchor = vec![0.0; d];
    for (o, x) in d_anchor.iter_mut().zip(positive) {
        *o = (p[0] - 1.0) * x / c;
    }
    let mut d_neg = Matrix::zeros(k, d);
    for r in 0..k {
        for (i, o) in d_anchor.iter_mut().enumerate() {
            *o += p[r + 1] * negatives[(r, i)] / c;
        }
        for (o, x) in d_neg.row_mut(r).iter_mut().zip(anchor) {
            *o = p[r + 1] * x / c;
        }
    }
    let d_pos: Vec<f64> = anchor.iter().map(|x| (p[0] - 1.0) * x / c).collect();
    Ok(LossReport::new(
        value,
        vec![
            ("anchor", Matrix::from_vec(1, d, d_anchor).expect("1×D")),
            ("positive", Matrix::from_vec(1, d, d_pos).expect("1×D")),
            ("negatives", d_neg),
        ],
    ))
}
