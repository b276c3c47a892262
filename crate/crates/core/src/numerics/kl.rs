use super::pooling::max_pool_scenes;
use super::{check_finite, LossReport, NumericsError};
use crate::linalg::Matrix;

/// Row-sum tolerance for distributions fed to [`kl_teacher`].
pub const NORMALIZATION_TOL: f64 = 1e-6;

fn smooth(q: &[f64], eps: Option<f64>) -> Vec<f64> {
    match eps {
        Some(e) => {
            let z = 1.0 + e * q.len() as f64;
            q.iter().map(|x| (x + e) / z).collect()
        }
        None => q.to_vec(),
    }
}

/// `KL(p ‖ q) = Σ p ln(p/q)` and its gradient in `p` (`ln(p/q) + 1`).
///
/// Entries with `p = 0` contribute nothing to the value; their gradient is the
/// one-sided limit `-inf`. With `smoothing = Some(ε)`, `q` becomes
/// `(q + ε)/(1 + nε)` first; without it a zero in `q` under positive `p` is an error.
/// `row` only labels errors.
pub fn kl_divergence(
    p: &[f64],
    q: &[f64],
    smoothing: Option<f64>,
    row: usize,
) -> Result<(f64, Vec<f64>), NumericsError> {
    if p.len() != q.len() {
        return Err(NumericsError::Shape(format!("p has {} entries, q has {}", p.len(), q.len())));
    }
    if p.iter().chain(q).any(|x| !x.is_finite()) {
        return Err(NumericsError::NonFinite("distribution"));
    }
    if p.iter().chain(q).any(|&x| x < 0.0) {
        return Err(NumericsError::NegativeProbability("distribution"));
    }
    let q = smooth(q, smoothing);
    let mut value = 0.0;
    let mut grad = vec![0.0; p.len()];
    for (i, (&pi, &qi)) in p.iter().zip(&q).enumerate() {
        if pi == 0.0 {
            grad[i] = f64::NEG_INFINITY;
            continue;
        }
        if qi == 0.0 {
            return Err(NumericsError::SupportViolation { row, index: i });
        }
        let l = (pi / qi).ln();
        value += pi * l;
        grad[i] = l + 1.0;
    }
    Ok((value, grad))
}

/// `Σ_t KL(p_t ‖ q_t)` over rows, without checking that rows are normalized.
pub fn kl_rowwise_sum(p: &Matrix, q: &Matrix, smoothing: Option<f64>) -> Result<LossReport, NumericsError> {
    if p.shape() != q.shape() {
        return Err(NumericsError::Shape(format!("p {:?} vs q {:?}", p.shape(), q.shape())));
    }
    let mut value = 0.0;
    let mut grad = Matrix::zeros(p.rows(), p.cols());
    for t in 0..p.rows() {
        let (v, g) = kl_divergence(p.row(t), q.row(t), smoothing, t)?;
        value += v;
        grad.row_mut(t).copy_from_slice(&g);
    }
    Ok(LossReport::new(value, vec![("p", grad)]))
}

fn check_rows_normalized(m: &Matrix, name: &'static str) -> Result<(), NumericsError> {
    for row in 0..m.rows() {
        let sum: f64 = m.row(row).iter().sum();
        if (sum - 1.0).abs() > NORMALIZATION_TOL {
            return Err(NumericsError::NotNormalized { name, row, sum });
        }
    }
    Ok(())
}

/// Sum over turning points of `KL(model_t ‖ teacher_t)`; gradient in `model`.
pub fn kl_teacher(model: &Matrix, teacher: &Matrix, smoothing: Option<f64>) -> Result<LossReport, NumericsError> {
    check_finite(model, "model")?;
    check_finite(teacher, "teacher")?;
    check_rows_normalized(model, "model")?;
    check_rows_normalized(teacher, "teacher")?;
    kl_rowwise_sum(model, teacher, smoothing)
}

/// Mean over turning points of `KL(p̄_t ‖ q_t)`, where `p̄_t` max-pools the
/// shot distribution `shot_probs[t]` into scenes and renormalizes.
///
/// `shot_probs` is T×M, `scene_probs` T×N, `shot_to_scene[m] < N`.
/// Gradient is with respect to `shot_probs`; only the arg-max shot of each
/// scene receives one.
pub fn kl_prediction_consistency(
    shot_probs: &Matrix,
    scene_probs: &Matrix,
    shot_to_scene: &[usize],
    smoothing: Option<f64>,
) -> Result<LossReport, NumericsError> {
    check_finite(shot_probs, "shot_probs")?;
    check_finite(scene_probs, "scene_probs")?;
    if shot_probs.rows() != scene_probs.rows() {
        return Err(NumericsError::Shape(format!(
            "{} shot distributions vs {} scene distributions",
            shot_probs.rows(),
            scene_probs.rows()
        )));
    }
    if shot_probs.rows() == 0 {
        return Err(NumericsError::TooFewRows { min: 1, found: 0 });
    }
    if shot_probs.as_slice().iter().any(|&x| x < 0.0) {
        return Err(NumericsError::NegativeProbability("shot_probs"));
    }
    let n_scenes = scene_probs.cols();
    let (pooled, arg) = max_pool_scenes(shot_probs, shot_to_scene, n_scenes)?;
    let t_count = shot_probs.rows() as f64;
    let mut value = 0.0;
    let mut grad = Matrix::zeros(shot_probs.rows(), shot_probs.cols());
    for t in 0..shot_probs.rows() {
        let z: f64 = pooled.row(t).iter().sum();
        if z <= 0.0 {
            return Err(NumericsError::ZeroMass { row: t });
        }
        let pbar: Vec<f64> = pooled.row(t).iter().map(|x| x / z).collect();
        let (v, g) = kl_divergence(&pbar, scene_probs.row(t), smoothing, t)?;
        value += v / t_count;
        // p̄_r = m_r / Z  ⇒  ∂/∂m_r = (g_r − Σ_s p̄_s g_s) / Z
        let mean_g: f64 = pbar.iter().zip(&g).filter(|(p, _)| **p > 0.0).map(|(p, gs)| p * gs).sum();
        for (scene, shot) in arg[t].iter().enumerate() {
            if let Some(shot) = *shot {
                grad[(t, shot)] = (g[scene] - mean_g) / z / t_count;
            }
        }
    }
    Ok(LossReport::new(value, vec![("shot_probs", grad)]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::testutil::{max_rel_err, numeric_grad, rng};
    use rand::Rng;

    fn dist(r: &mut impl Rng, rows: usize, cols: usize) -> Matrix {
        let mut m = Matrix::zeros(rows, cols);
        for t in 0..rows {
            let raw: Vec<f64> = (0..cols).map(|_| r.gen_range(0.05..1.0)).collect();
            let s: f64 = raw.iter().sum();
            for (o, x) in m.row_mut(t).iter_mut().zip(raw) {
                *o = x / s;
            }
        }
        m
    }

    #[test]
    fn closed_form_two_point() {
        let p = Matrix::from_rows(&[[0.5, 0.5]]).unwrap();
        let q = Matrix::from_rows(&[[0.25, 0.75]]).unwrap();
        let rep = kl_prediction_consistency(&p, &q, &[0, 1], None).unwrap();
        let want = 0.5 * 2f64.ln() + 0.5 * (2.0f64 / 3.0).ln();
        assert!((rep.value - want).abs() < 1e-12);
        assert!((rep.value - 0.14384).abs() < 1e-5);
    }

    #[test]
    fn equal_distributions_give_zero() {
        let mut r = rng(3);
        let p = dist(&mut r, 4, 6);
        assert!(kl_teacher(&p, &p, None).unwrap().value.abs() < 1e-12);
        let rep = kl_prediction_consistency(&p, &p, &[0, 1, 2, 3, 4, 5], None).unwrap();
        assert!(rep.value.abs() < 1e-12);
    }

    #[test]
    fn pooling_then_renormalizing() {
        // scenes {0,1}, {2}: maxima 0.4, 0.2 → p̄ = (2/3, 1/3)
        let p = Matrix::from_rows(&[[0.4, 0.4, 0.2]]).unwrap();
        let q = Matrix::from_rows(&[[2.0 / 3.0, 1.0 / 3.0]]).unwrap();
        let rep = kl_prediction_consistency(&p, &q, &[0, 0, 1], None).unwrap();
        assert!(rep.value.abs() < 1e-12);
    }

    #[test]
    fn teacher_is_additive() {
        let p = Matrix::from_rows(&[[0.5, 0.5]; 5]).unwrap();
        let q = Matrix::from_rows(&[[0.25, 0.75]; 5]).unwrap();
        let one = kl_teacher(
            &Matrix::from_rows(&[[0.5, 0.5]]).unwrap(),
            &Matrix::from_rows(&[[0.25, 0.75]]).unwrap(),
            None,
        )
        .unwrap()
        .value;
        let rep = kl_teacher(&p, &q, None).unwrap();
        assert!((rep.value - 5.0 * one).abs() < 1e-12);
    }

    #[test]
    fn teacher_matches_direct_sum() {
        let mut r = rng(5);
        let p = dist(&mut r, 5, 8);
        let q = dist(&mut r, 5, 8);
        let mut direct = 0.0;
        for t in 0..5 {
            for i in 0..8 {
                direct += p[(t, i)] * (p[(t, i)] / q[(t, i)]).ln();
            }
        }
        assert!((kl_teacher(&p, &q, None).unwrap().value - direct).abs() < 1e-12);
    }

    #[test]
    fn support_violations_raise_unless_smoothed() {
        let p = Matrix::from_rows(&[[0.5, 0.5]]).unwrap();
        let q = Matrix::from_rows(&[[1.0, 0.0]]).unwrap();
        assert_eq!(
            kl_teacher(&p, &q, None),
            Err(NumericsError::SupportViolation { row: 0, index: 1 })
        );
        let rep = kl_teacher(&p, &q, Some(1e-8)).unwrap();
        assert!(rep.value.is_finite() && rep.value > 0.0);
    }

    #[test]
    fn input_errors() {
        let p = Matrix::from_rows(&[[0.5, 0.6]]).unwrap();
        assert!(matches!(kl_teacher(&p, &p, None), Err(NumericsError::NotNormalized { .. })));
        let zero = Matrix::from_rows(&[[0.0, 0.0]]).unwrap();
        let q = Matrix::from_rows(&[[0.5, 0.5]]).unwrap();
        assert_eq!(
            kl_prediction_consistency(&zero, &q, &[0, 1], None),
            Err(NumericsError::ZeroMass { row: 0 })
        );
        let neg = Matrix::from_rows(&[[-0.1, 1.1]]).unwrap();
        assert!(kl_prediction_consistency(&neg, &q, &[0, 1], None).is_err());
        assert!(kl_prediction_consistency(&q, &q, &[0], None).is_err());
    }

    #[test]
    fn kl_is_nonnegative() {
        let mut r = rng(9);
        for _ in 0..50 {
            let p = dist(&mut r, 3, 5);
            let q = dist(&mut r, 3, 5);
            assert!(kl_teacher(&p, &q, None).unwrap().value >= 0.0);
        }
    }

    #[test]
    fn gradients_match_finite_differences() {
        let mut r = rng(21);
        for _ in 0..20 {
            let p = dist(&mut r, 3, 6);
            let q = dist(&mut r, 3, 6);
            let rep = kl_rowwise_sum(&p, &q, None).unwrap();
            let num = numeric_grad(&p, 1e-5, |x| kl_rowwise_sum(x, &q, None).unwrap().value);
            assert!(max_rel_err(rep.gradient("p").unwrap(), &num) < 1e-4);

            let shots = dist(&mut r, 3, 7);
            let scenes = dist(&mut r, 3, 3);
            let map = [0, 0, 1, 1, 1, 2, 2];
            let rep = kl_prediction_consistency(&shots, &scenes, &map, None).unwrap();
            let num = numeric_grad(&shots, 1e-5, |x| {
                kl_prediction_consistency(x, &scenes, &map, None).unwrap().value
            });
            assert!(max_rel_err(rep.gradient("shot_probs").unwrap(), &num) < 1e-4);
        }
    }
}
