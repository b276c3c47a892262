//! Bi-directional attention fusion of subtitle, audio and visual sequences.
//!
//! For a query sequence `X` and a context `Y` (rows are positions),
//! `attend(X, Y) = softmax_rows(X Yᵀ) Y`. Each modality is fused as
//! `X' = attend(X, Y) + attend(X, Z) + X` with the other two as contexts.

use serde::{Deserialize, Serialize};

use super::{check_finite, LossReport, NumericsError};
use crate::linalg::Matrix;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Modalities {
    pub text: Matrix,
    pub audio: Matrix,
    pub video: Matrix,
}

fn check_shapes(t: &Matrix, a: &Matrix, v: &Matrix) -> Result<(), NumericsError> {
    if t.shape() != a.shape() || t.shape() != v.shape() {
        return Err(NumericsError::Shape(format!(
            "text {:?}, audio {:?}, video {:?} must match",
            t.shape(),
            a.shape(),
            v.shape()
        )));
    }
    check_finite(t, "text")?;
    check_finite(a, "audio")?;
    check_finite(v, "video")
}

fn attend(x: &Matrix, y: &Matrix) -> (Matrix, Matrix) {
    let r = x.matmul_t(y).softmax_rows();
    let out = r.matmul(y);
    (out, r)
}

/// Accumulates the input gradients of `attend(x, y)` given upstream `g`.
fn attend_backward(x: &Matrix, y: &Matrix, r: &Matrix, g: &Matrix, dx: &mut Matrix, dy: &mut Matrix) {
    // out = R Y
    dy.add_assign(&r.transpose().matmul(g));
    let dr = g.matmul_t(y);
    // softmax rows: dS = R ⊙ (dR − rowsum(dR ⊙ R))
    let mut ds = Matrix::zeros(r.rows(), r.cols());
    for i in 0..r.rows() {
        let inner: f64 = dr.row(i).iter().zip(r.row(i)).map(|(a, b)| a * b).sum();
        for j in 0..r.cols() {
            ds[(i, j)] = r[(i, j)] * (dr[(i, j)] - inner);
        }
    }
    // S = X Yᵀ
    dx.add_assign(&ds.matmul(y));
    dy.add_assign(&ds.transpose().matmul(x));
}

pub fn bidaf_fuse(t: &Matrix, a: &Matrix, v: &Matrix) -> Result<Modalities, NumericsError> {
    check_shapes(t, a, v)?;
    let fuse = |x: &Matrix, y: &Matrix, z: &Matrix| {
        let mut out = attend(x, y).0;
        out.add_assign(&attend(x, z).0);
        out.add_assign(x);
        out
    };
    Ok(Modalities {
        text: fuse(t, a, v),
        audio: fuse(a, t, v),
        video: fuse(v, t, a),
    })
}

/// Gradients of `<upstream, bidaf_fuse(t, a, v)>` with respect to `t`, `a`, `v`.
pub fn bidaf_fuse_backward(
    t: &Matrix,
    a: &Matrix,
    v: &Matrix,
    upstream: &Modalities,
) -> Result<Modalities, NumericsError> {
    check_shapes(t, a, v)?;
    check_shapes(&upstream.text, &upstream.audio, &upstream.video)?;
    if upstream.text.shape() != t.shape() {
        return Err(NumericsError::Shape("upstream gradient shape differs from inputs".into()));
    }
    let (n, d) = t.shape();
    let mut dt = Matrix::zeros(n, d);
    let mut da = Matrix::zeros(n, d);
    let mut dv = Matrix::zeros(n, d);

    // residual paths
    dt.add_assign(&upstream.text);
    da.add_assign(&upstream.audio);
    dv.add_assign(&upstream.video);

    let pairs: [(&Matrix, &Matrix, &Matrix, usize, usize); 6] = [
        (t, a, &upstream.text, 0, 1),
        (t, v, &upstream.text, 0, 2),
        (a, t, &upstream.audio, 1, 0),
        (a, v, &upstream.audio, 1, 2),
        (v, t, &upstream.video, 2, 0),
        (v, a, &upstream.video, 2, 1),
    ];
    for (x, y, g, xi, yi) in pairs {
        let (_, r) = attend(x, y);
        let mut gx = Matrix::zeros(n, d);
        let mut gy = Matrix::zeros(n, d);
        attend_backward(x, y, &r, g, &mut gx, &mut gy);
        for (idx, grad) in [(xi, gx), (yi, gy)] {
            match idx {
                0 => dt.add_assign(&grad),
                1 => da.add_assign(&grad),
                _ => dv.add_assign(&grad),
            }
        }
    }
    Ok(Modalities {
        text: dt,
        audio: da,
        video: dv,
    })
}

/// Scalar `Σ weights ⊙ bidaf_fuse(t, a, v)`, used to check the fusion gradients.
pub fn bidaf_weighted_sum(
    t: &Matrix,
    a: &Matrix,
    v: &Matrix,
    weights: &Modalities,
) -> Result<LossReport, NumericsError> {
    let fused = bidaf_fuse(t, a, v)?;
    if weights.text.shape() != fused.text.shape() {
        return Err(NumericsError::Shape("weights must match the inputs".into()));
    }
    let inner = |x: &Matrix, y: &Matrix| -> f64 {
        x.as_slice().iter().zip(y.as_slice()).map(|(p, q)| p * q).sum()
    };
    let value = inner(&fused.text, &weights.text)
        + inner(&fused.audio, &weights.audio)
        + inner(&fused.video, &weights.video);
    let g = bidaf_fuse_backward(t, a, v, weights)?;
    Ok(LossReport::new(
        value,
        vec![("text", g.text), ("audio", g.audio), ("video", g.video)],
    ))
}
