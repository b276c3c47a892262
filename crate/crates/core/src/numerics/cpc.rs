use serde::{Deserialize, Serialize};

use super::{check_finite, NumericsError};
use crate::linalg::Matrix;
use crate::model::MovieGraph;

pub const DEFAULT_WALK_STEPS: usize = 3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WalkRepresentation {
    /// Visited nodes, anchor first.
    pub path: Vec<usize>,
    pub representation: Vec<f64>,
}

/// Greedy walk of up to `steps` hops from `anchor` along the heaviest edge
/// (smaller index on ties), stopping early at a node without neighbours.
/// The representation is the mean of `reps` rows along the path.
pub fn cpc_walk_representation(
    graph: &MovieGraph,
    reps: &Matrix,
    anchor: usize,
    steps: usize,
) -> Result<WalkRepresentation, NumericsError> {
    graph.check_node(anchor)?;
    if reps.rows() != graph.n_shots() {
        return Err(NumericsError::Shape(format!(
            "{} representations for {} nodes",
            reps.rows(),
            graph.n_shots()
        )));
    }
    check_finite(reps, "reps")?;
    let mut path = vec![anchor];
    let mut node = anchor;
    for _ in 0..steps {
        let next = graph
            .neighbors(node)
            .iter()
            .fold(None::<(usize, f64)>, |best, nb| match best {
                Some((t, w)) if w > nb.weight || (w == nb.weight && t < nb.target) => Some((t, w)),
                _ => Some((nb.target, nb.weight)),
            });
        match next {
            Some((t, _)) => {
                path.push(t);
                node = t;
            }
            None => break,
        }
    }
    let mut representation = vec![0.0; reps.cols()];
    for &p in &path {
        for (o, x) in representation.iter_mut().zip(reps.row(p)) {
            *o += x;
        }
    }
    let n = path.len() as f64;
    representation.iter_mut().for_each(|x| *x /= n);
    Ok(WalkRepresentation { path, representation })
}
