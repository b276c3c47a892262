use serde::{Deserialize, Serialize};

use super::{KMode, ModelError, SimilarityParams};
use crate::linalg::{softmax_in_place, Matrix};

/// Row sums of a normalised transition matrix must be within this of 1.
pub const ROW_SUM_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Neighbor {
    pub target: usize,
    /// Transition weight re-normalised within the neighbourhood.
    pub weight: f64,
}

/// Sparse forward-only shot graph.
///
/// `transition` is the dense upper-triangular row-stochastic matrix the
/// neighbourhoods were cut from. The last row is all zeros.
#[derive(Debug, Clone, PartialEq)]
pub struct MovieGraph {
    transition: Matrix,
    neighborhoods: Vec<Vec<Neighbor>>,
    k_per_node: Vec<usize>,
}

impl MovieGraph {
    /// Builds a graph from explicit forward edges. Weights per node are
    /// re-normalised; `transition` mirrors the sparse weights.
    pub fn from_neighborhoods(
        n_shots: usize,
        edges: Vec<Vec<(usize, f64)>>,
    ) -> Result<Self, ModelError> {
        if n_shots < 2 {
            return Err(ModelError::TooFewShots(n_shots));
        }
        if edges.len() != n_shots {
            return Err(ModelError::InvalidMatrix(format!(
                "expected {n_shots} neighbourhoods, got {}",
                edges.len()
            )));
        }
        let mut transition = Matrix::zeros(n_shots, n_shots);
        let mut neighborhoods = Vec::with_capacity(n_shots);
        let mut k_per_node = Vec::with_capacity(n_shots);
        for (i, row) in edges.into_iter().enumerate() {
            let mut hood: Vec<Neighbor> = Vec::with_capacity(row.len());
            for (target, weight) in row {
                if target <= i || target >= n_shots {
                    return Err(ModelError::InvalidNode {
                        node: target,
                        n_shots,
                    });
                }
                if !(weight.is_finite() && weight > 0.0) {
                    return Err(ModelError::InvalidMatrix(format!(
                        "edge {i}->{target} needs a positive finite weight"
                    )));
                }
                if hood.iter().any(|n| n.target == target) {
                    return Err(ModelError::InvalidMatrix(format!("duplicate edge {i}->{target}")));
                }
                hood.push(Neighbor { target, weight });
            }
            let total: f64 = hood.iter().map(|n| n.weight).sum();
            for n in &mut hood {
                n.weight /= total;
                transition[(i, n.target)] = n.weight;
            }
            k_per_node.push(hood.len());
            neighborhoods.push(hood);
        }
        Ok(Self {
            transition,
            neighborhoods,
            k_per_node,
        })
    }

    pub fn n_shots(&self) -> usize {
        self.neighborhoods.len()
    }

    pub fn transition(&self) -> &Matrix {
        &self.transition
    }

    pub fn neighbors(&self, node: usize) -> &[Neighbor] {
        &self.neighborhoods[node]
    }

    pub fn k_per_node(&self) -> &[usize] {
        &self.k_per_node
    }

    /// Renormalised weight of edge `from -> to`, if it exists.
    pub fn edge_weight(&self, from: usize, to: usize) -> Option<f64> {
        self.neighborhoods
            .get(from)?
            .iter()
            .find(|n| n.target == to)
            .map(|n| n.weight)
    }

    pub fn check_node(&self, node: usize) -> Result<(), ModelError> {
        if node < self.n_shots() {
            Ok(())
        } else {
            Err(ModelError::InvalidNode {
                node,
                n_shots: self.n_shots(),
            })
        }
    }

    /// All sparse edges as `(source, target, weight)` in source order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.neighborhoods
            .iter()
            .enumerate()
            .flat_map(|(i, hood)| hood.iter().map(move |n| (i, n.target, n.weight)))
    }
}

/// Masks everything at or below the diagonal and softmax-normalises each
/// row over its future entries. The last row stays all zeros.
pub fn normalize_transition(e: &Matrix) -> Result<Matrix, ModelError> {
    let (rows, cols) = e.shape();
    if rows != cols {
        return Err(ModelError::InvalidMatrix(format!("{rows}x{cols} is not square")));
    }
    if rows < 2 {
        return Err(ModelError::TooFewShots(rows));
    }
    if !e.is_finite() {
        return Err(ModelError::InvalidMatrix("non-finite entry".into()));
    }
    let m = rows;
    let mut t = Matrix::zeros(m, m);
    for i in 0..m - 1 {
        let mut future = e.row(i)[i + 1..].to_vec();
        softmax_in_place(&mut future);
        t.row_mut(i)[i + 1..].copy_from_slice(&future);
    }
    Ok(t)
}

/// Cuts a top-k future neighbourhood per node out of a normalised transition matrix.
pub fn sparsify(transition: &Matrix, params: &SimilarityParams) -> Result<MovieGraph, ModelError> {
    params.validate()?;
    let (m, cols) = transition.shape();
    if m != cols {
        return Err(ModelError::InvalidMatrix(format!("{m}x{cols} is not square")));
    }
    if m < 2 {
        return Err(ModelError::TooFewShots(m));
    }
    let options = params.sorted_options();
    let max_option = *options.last().expect("validated non-empty");

    let mut neighborhoods = Vec::with_capacity(m);
    let mut k_per_node = Vec::with_capacity(m);
    for i in 0..m {
        // future nodes by descending weight, smaller index first on ties
        let mut ranked: Vec<(usize, f64)> = ((i + 1)..m).map(|j| (j, transition[(i, j)])).collect();
        ranked.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));

        let k = match params.k_mode {
            KMode::Fixed { k } => k,
            KMode::MassCoverage { theta } => {
                let mut prefix = Vec::with_capacity(ranked.len() + 1);
                prefix.push(0.0);
                for (_, w) in &ranked {
                    prefix.push(prefix.last().copied().unwrap_or(0.0) + w);
                }
                options
                    .iter()
                    .copied()
                    .find(|&k| prefix[k.min(ranked.len())] >= theta)
                    .unwrap_or(max_option)
            }
        };

        ranked.truncate(k);
        let total: f64 = ranked.iter().map(|(_, w)| w).sum();
        let hood = ranked
            .into_iter()
            .map(|(target, w)| Neighbor {
                target,
                weight: if total > 0.0 { w / total } else { 0.0 },
            })
            .collect();
        neighborhoods.push(hood);
        k_per_node.push(k);
    }

    Ok(MovieGraph {
        transition: transition.clone(),
        neighborhoods,
        k_per_node,
    })
}
