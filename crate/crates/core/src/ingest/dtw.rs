use serde::{Deserialize, Serialize};

use super::IngestError;
use crate::linalg::cosine;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlignmentResult {
    /// Index pairs from `(0, 0)` to `(n-1, m-1)`.
    pub path: Vec<(usize, usize)>,
    pub total_cost: f64,
}

/// `1 − cos(a, b)`, never below zero; exactly zero for equal vectors.
pub fn step_cost(a: &[f64], b: &[f64]) -> f64 {
    if a == b {
        return 0.0;
    }
    (1.0 - cosine(a, b)).max(0.0)
}

/// Classic DTW with unit steps right, down and diagonal.
///
/// Backtracking prefers the diagonal, then advancing `a`, then advancing `b`.
pub fn dtw_align<A: AsRef<[f64]>, B: AsRef<[f64]>>(a: &[A], b: &[B]) -> Result<AlignmentResult, IngestError> {
    if a.is_empty() {
        return Err(IngestError::EmptySequence("first"));
    }
    if b.is_empty() {
        return Err(IngestError::EmptySequence("second"));
    }
    let dim = a[0].as_ref().len();
    for (name, seq) in [("a", a.iter().map(|x| x.as_ref()).collect::<Vec<_>>()), ("b", b.iter().map(|x| x.as_ref()).collect())] {
        if let Some((i, x)) = seq.iter().enumerate().find(|(_, x)| x.len() != dim) {
            return Err(IngestError::Dimension {
                field: format!("{name}[{i}]"),
                expected: dim,
                found: x.len(),
            });
        }
    }

    let (n, m) = (a.len(), b.len());
    let mut acc = vec![f64::INFINITY; n * m];
    let at = |i: usize, j: usize| i * m + j;
    for i in 0..n {
        for j in 0..m {
            let c = step_cost(a[i].as_ref(), b[j].as_ref());
            let prev = if i == 0 && j == 0 {
                0.0
            } else {
                let mut best = f64::INFINITY;
                if i > 0 && j > 0 {
                    best = best.min(acc[at(i - 1, j - 1)]);
                }
                if i > 0 {
                    best = best.min(acc[at(i - 1, j)]);
                }
                if j > 0 {
                    best = best.min(acc[at(i, j - 1)]);
                }
                best
            };
            acc[at(i, j)] = c + prev;
        }
    }

    let mut path = vec![(n - 1, m - 1)];
    let (mut i, mut j) = (n - 1, m - 1);
    while (i, j) != (0, 0) {
        let mut moves = Vec::with_capacity(3);
        if i > 0 && j > 0 {
            moves.push((i - 1, j - 1));
        }
        if i > 0 {
            moves.push((i - 1, j));
        }
        if j > 0 {
            moves.push((i, j - 1));
        }
        let mut best = moves[0];
        for &mv in &moves[1..] {
            if acc[at(mv.0, mv.1)] < acc[at(best.0, best.1)] {
                best = mv;
            }
        }
        (i, j) = best;
        path.push(best);
    }
    path.reverse();
    Ok(AlignmentResult {
        path,
        total_cost: acc[at(n - 1, m - 1)],
    })
}
