use std::collections::VecDeque;

use super::{ModelError, MovieGraph};

/// BFS hop count from `from` to the nearest node in `targets` along sparse
/// edges. `None` when no target is reachable.
pub fn hop_count(
    graph: &MovieGraph,
    from: usize,
    targets: &[usize],
) -> Result<Option<usize>, ModelError> {
    graph.check_node(from)?;
    let n = graph.n_shots();
    let mut is_target = vec![false; n];
    for &t in targets {
        graph.check_node(t)?;
        is_target[t] = true;
    }
    if is_target[from] {
        return Ok(Some(0));
    }
    let mut dist = vec![usize::MAX; n];
    dist[from] = 0;
    let mut queue = VecDeque::from([from]);
    while let Some(u) = queue.pop_front() {
        for nb in graph.neighbors(u) {
            let v = nb.target;
            if dist[v] != usize::MAX {
                continue;
            }
            dist[v] = dist[u] + 1;
            if is_target[v] {
                return Ok(Some(dist[v]));
            }
            queue.push_back(v);
        }
    }
    Ok(None)
}

/// Hop distance to the nearest target divided by the number of shots.
/// Unreachable (or no targets) maps to 1.0.
pub fn shortest_hops(graph: &MovieGraph, from: usize, targets: &[usize]) -> Result<f64, ModelError> {
    Ok(match hop_count(graph, from, targets)? {
        Some(h) => (h as f64 / graph.n_shots() as f64).min(1.0),
        None => 1.0,
    })
}
