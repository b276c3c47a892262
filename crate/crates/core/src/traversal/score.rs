use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use super::{SentimentTerm, TpSets, TraversalConfig, TraversalError};
use crate::model::{flow_target, hop_count, shortest_hops, MovieGraph, SignedSentiment, NUM_TPS};

/// Raw criterion values for one candidate and the combined score.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScoreBreakdown {
    /// Neighbourhood transition weight `e_ij`.
    pub semantic: f64,
    /// `(j − i) / M`.
    pub temporal: f64,
    /// Normalised hops from the candidate to the next uncovered turning point.
    pub narrative: f64,
    /// Distance of the candidate's sentiment from the flow target.
    pub sentiment: f64,
    /// Spoiler proximity in [0, 1]; 0 when the penalty is disabled.
    pub spoiler: f64,
    pub total: f64,
}

impl ScoreBreakdown {
    fn combine(
        config: &TraversalConfig,
        semantic: f64,
        temporal: f64,
        narrative: f64,
        sentiment: f64,
        spoiler: f64,
    ) -> Self {
        let mut b = Self {
            semantic,
            temporal,
            narrative,
            sentiment,
            spoiler,
            total: 0.0,
        };
        b.total = b.recombine(config);
        b
    }

    /// Weighted sum of the raw terms under `config`.
    pub fn recombine(&self, config: &TraversalConfig) -> f64 {
        self.contributions(config).iter().sum()
    }

    /// Signed weighted terms in the order semantic, temporal, narrative,
    /// sentiment, spoiler. They add up to `total`.
    pub fn contributions(&self, config: &TraversalConfig) -> [f64; 5] {
        let l = &config.lambdas;
        let spoiler_weight = config.spoiler_penalty.map_or(0.0, |p| p.weight);
        [
            l.semantic * self.semantic,
            -l.temporal * self.temporal,
            -l.narrative * self.narrative,
            -l.sentiment * self.sentiment,
            -spoiler_weight * self.spoiler,
        ]
    }
}

fn sentiment_term(
    mode: SentimentTerm,
    current: SignedSentiment,
    candidate: SignedSentiment,
    target: f64,
) -> f64 {
    let p = match mode {
        SentimentTerm::TargetIntensity => candidate.intensity(),
        SentimentTerm::IntensityChange => (candidate.intensity() - current.intensity()).abs(),
    };
    (p - target).abs()
}

fn spoiler_term(hops: Option<usize>, horizon: usize) -> f64 {
    match hops {
        Some(h) => (1.0 - h as f64 / horizon as f64).max(0.0),
        None => 0.0,
    }
}

/// Scores moving from `current` to `candidate` as the `k`-th shot (1-based)
/// of the path. `next_tp` is the 0-based turning point being sought, or
/// `None` once all are covered.
///
/// Hop distances are computed directly by BFS; [`Scorer`] produces the same
/// numbers from precomputed distance tables.
#[allow(clippy::too_many_arguments)]
pub fn step_score(
    graph: &MovieGraph,
    current: usize,
    candidate: usize,
    k: usize,
    sentiments: &[SignedSentiment],
    tp_sets: &TpSets,
    next_tp: Option<usize>,
    config: &TraversalConfig,
) -> Result<ScoreBreakdown, TraversalError> {
    graph.check_node(current)?;
    let semantic = graph
        .edge_weight(current, candidate)
        .ok_or(TraversalError::NotANeighbor { from: current, to: candidate })?;
    let m = graph.n_shots() as f64;
    let temporal = (candidate - current) as f64 / m;
    let narrative = match next_tp {
        Some(t) => shortest_hops(graph, candidate, &tp_sets.ids(t))?,
        None => 0.0,
    };
    let target = flow_target(k, &config.schedule())?;
    let sentiment = sentiment_term(
        config.sentiment_term,
        sentiments[current],
        sentiments[candidate],
        target,
    );
    let spoiler = match config.spoiler_penalty {
        Some(p) => {
            let mut late: Vec<usize> = tp_sets.ids(3);
            late.extend(tp_sets.ids(4));
            spoiler_term(hop_count(graph, candidate, &late)?, p.horizon)
        }
        None => 0.0,
    };
    Ok(ScoreBreakdown::combine(config, semantic, temporal, narrative, sentiment, spoiler))
}

/// Scoring context for one movie and configuration, with hop tables cached.
#[derive(Debug, Clone)]
pub struct Scorer<'a> {
    pub graph: &'a MovieGraph,
    pub sentiments: &'a [SignedSentiment],
    pub tp_sets: &'a TpSets,
    pub config: &'a TraversalConfig,
    cover: [Vec<bool>; NUM_TPS],
    hops_to_tp: [Vec<Option<usize>>; NUM_TPS],
    hops_to_late_tps: Vec<Option<usize>>,
    flow: Vec<f64>,
}

impl<'a> Scorer<'a> {
    pub fn new(
        graph: &'a MovieGraph,
        sentiments: &'a [SignedSentiment],
        tp_sets: &'a TpSets,
        config: &'a TraversalConfig,
    ) -> Result<Self, TraversalError> {
        config.validate()?;
        let n = graph.n_shots();
        if sentiments.len() != n {
            return Err(TraversalError::SentimentLength {
                expected: n,
                found: sentiments.len(),
            });
        }
        tp_sets.validate(n)?;
        let reverse = reverse_adjacency(graph);
        let hops_to_tp = std::array::from_fn(|t| hops_to_set(&reverse, &tp_sets.ids(t)));
        let mut late = tp_sets.ids(3);
        late.extend(tp_sets.ids(4));
        let schedule = config.schedule();
        let flow = (1..=config.budget)
            .map(|k| flow_target(k, &schedule).expect("k within budget"))
            .collect();
        Ok(Self {
            graph,
            sentiments,
            tp_sets,
            config,
            cover: tp_sets.cover_masks(graph),
            hops_to_tp,
            hops_to_late_tps: hops_to_set(&reverse, &late),
            flow,
        })
    }

    pub fn n_shots(&self) -> usize {
        self.graph.n_shots()
    }

    pub fn flow_target(&self, k: usize) -> f64 {
        self.flow[k - 1]
    }

    pub fn flow_targets(&self) -> &[f64] {
        &self.flow
    }

    /// Whether selecting `shot` covers turning point `t`.
    pub fn covers(&self, t: usize, shot: usize) -> bool {
        self.cover[t][shot]
    }

    pub fn intensity(&self, shot: usize) -> f64 {
        self.sentiments[shot].intensity()
    }

    /// Lowest uncovered turning point that has any shots.
    pub fn next_tp(&self, covered: &[bool; NUM_TPS]) -> Option<usize> {
        (0..NUM_TPS).find(|&t| !covered[t] && !self.tp_sets.members(t).is_empty())
    }

    /// All non-empty turning points covered. Never true without TP information.
    pub fn all_covered(&self, covered: &[bool; NUM_TPS]) -> bool {
        !self.tp_sets.is_degenerate() && self.next_tp(covered).is_none()
    }

    /// Score for `candidate` from `current` at 1-based step `k`. The caller
    /// guarantees `candidate` is a neighbour with weight `semantic`.
    pub fn score(
        &self,
        current: usize,
        candidate: usize,
        semantic: f64,
        k: usize,
        next_tp: Option<usize>,
    ) -> ScoreBreakdown {
        let m = self.n_shots() as f64;
        let temporal = (candidate - current) as f64 / m;
        let narrative = match next_tp {
            Some(t) => match self.hops_to_tp[t][candidate] {
                Some(h) => (h as f64 / m).min(1.0),
                None => 1.0,
            },
            None => 0.0,
        };
        let sentiment = sentiment_term(
            self.config.sentiment_term,
            self.sentiments[current],
            self.sentiments[candidate],
            self.flow_target(k),
        );
        let spoiler = match self.config.spoiler_penalty {
            Some(p) => spoiler_term(self.hops_to_late_tps[candidate], p.horizon),
            None => 0.0,
        };
        ScoreBreakdown::combine(self.config, semantic, temporal, narrative, sentiment, spoiler)
    }
}

fn reverse_adjacency(graph: &MovieGraph) -> Vec<Vec<usize>> {
    let mut rev = vec![Vec::new(); graph.n_shots()];
    for (s, t, _) in graph.edges() {
        rev[t].push(s);
    }
    rev
}

/// Multi-source BFS over reversed edges: hops from every node to the set.
fn hops_to_set(reverse: &[Vec<usize>], targets: &[usize]) -> Vec<Option<usize>> {
    let mut dist = vec![None; reverse.len()];
    let mut queue = VecDeque::new();
    for &t in targets {
        if dist[t].is_none() {
            dist[t] = Some(0);
            queue.push_back(t);
        }
    }
    while let Some(u) = queue.pop_front() {
        let du = dist[u].expect("queued nodes have distances");
        for &p in &reverse[u] {
            if dist[p].is_none() {
                dist[p] = Some(du + 1);
                queue.push_back(p);
            }
        }
    }
    dist
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::traversal::{Lambdas, SpoilerPenalty};

    fn config(l: [f64; 4]) -> TraversalConfig {
        TraversalConfig {
            lambdas: Lambdas::new(l[0], l[1], l[2], l[3]),
            ..Default::default()
        }
    }

    fn neutral(n: usize) -> Vec<SignedSentiment> {
        vec![SignedSentiment::default(); n]
    }

    #[test]
    fn semantic_only_scores_equal_weights() {
        let g = MovieGraph::from_neighborhoods(
            4,
            vec![vec![(1, 0.625), (2, 0.375)], vec![], vec![], vec![]],
        )
        .unwrap();
        let c = config([1.0, 0.0, 0.0, 0.0]);
        let tp = TpSets::empty();
        let s = neutral(4);
        let a = step_score(&g, 0, 1, 2, &s, &tp, None, &c).unwrap();
        let b = step_score(&g, 0, 2, 2, &s, &tp, None, &c).unwrap();
        assert!((a.total - 0.625).abs() < 1e-12);
        assert!((b.total - 0.375).abs() < 1e-12);
    }

    #[test]
    fn exact_flow_match_scores_zero() {
        let g = MovieGraph::from_neighborhoods(2, vec![vec![(1, 1.0)], vec![]]).unwrap();
        let c = config([0.0, 0.0, 0.0, 1.0]);
        let s = vec![SignedSentiment::default(), SignedSentiment::new(-0.7).unwrap()];
        // k = 1 sits in the first section with target 0.7
        let b = step_score(&g, 0, 1, 1, &s, &TpSets::empty(), None, &c).unwrap();
        assert!(b.sentiment.abs() < 1e-12);
        assert!(b.total.abs() < 1e-12);
    }

    #[test]
    fn tuned_weights_hand_evaluation() {
        // M = 10, i = 2, j = 4, e = 0.5, d = 0.2 (two hops to the TP), intensity 0.4, f_k = 0
        let mut edges: Vec<Vec<(usize, f64)>> = vec![vec![]; 10];
        edges[2] = vec![(3, 1.0), (4, 1.0)];
        edges[4] = vec![(5, 1.0)];
        edges[5] = vec![(6, 1.0)];
        let g = MovieGraph::from_neighborhoods(10, edges).unwrap();
        let tp = TpSets::from_labels([vec![2], vec![6], vec![], vec![], vec![]]);
        let mut s = neutral(10);
        s[4] = SignedSentiment::new(0.4).unwrap();
        let c = config([1.0, 5.0, 10.0, 10.0]);
        // budget 10: k = 5 lies in the flat middle section
        let b = step_score(&g, 2, 4, 5, &s, &tp, Some(1), &c).unwrap();
        assert!((b.semantic - 0.5).abs() < 1e-12);
        assert!((b.temporal - 0.2).abs() < 1e-12);
        assert!((b.narrative - 0.2).abs() < 1e-12);
        assert!((b.sentiment - 0.4).abs() < 1e-12);
        assert!((b.total - -6.5).abs() < 1e-9);
    }

    #[test]
    fn non_neighbour_is_rejected() {
        let g = MovieGraph::from_neighborhoods(3, vec![vec![(1, 1.0)], vec![(2, 1.0)], vec![]]).unwrap();
        let c = TraversalConfig::default();
        let err = step_score(&g, 0, 2, 2, &neutral(3), &TpSets::empty(), None, &c).unwrap_err();
        assert_eq!(err, TraversalError::NotANeighbor { from: 0, to: 2 });
    }

    #[test]
    fn spoiler_penalty_decays_with_hops() {
        let g = MovieGraph::from_neighborhoods(
            4,
            vec![vec![(1, 1.0), (2, 1.0)], vec![(3, 1.0)], vec![], vec![]],
        )
        .unwrap();
        let tp = TpSets::from_labels([vec![0], vec![], vec![], vec![3], vec![]]);
        let mut c = config([0.0, 0.0, 0.0, 0.0]);
        c.spoiler_penalty = Some(SpoilerPenalty { weight: 2.0, horizon: 2 });
        let s = neutral(4);
        let near = step_score(&g, 0, 1, 2, &s, &tp, None, &c).unwrap();
        assert!((near.spoiler - 0.5).abs() < 1e-12);
        assert!((near.total - -1.0).abs() < 1e-12);
        let far = step_score(&g, 0, 2, 2, &s, &tp, None, &c).unwrap();
        assert_eq!(far.spoiler, 0.0);
    }

    #[test]
    fn cached_scorer_matches_direct_formula() {
        let mut edges: Vec<Vec<(usize, f64)>> = vec![vec![]; 8];
        edges[0] = vec![(1, 0.3), (3, 0.7)];
        edges[1] = vec![(2, 1.0), (5, 0.5)];
        edges[3] = vec![(4, 1.0), (6, 1.0)];
        edges[4] = vec![(7, 1.0)];
        let g = MovieGraph::from_neighborhoods(8, edges).unwrap();
        let tp = TpSets::from_labels([vec![0], vec![4], vec![7], vec![6], vec![5]]);
        let s: Vec<_> = (0..8)
            .map(|i| SignedSentiment::new(i as f64 / 8.0 - 0.4).unwrap())
            .collect();
        let c = TraversalConfig {
            spoiler_penalty: Some(SpoilerPenalty { weight: 3.0, horizon: 3 }),
            sentiment_term: SentimentTerm::IntensityChange,
            ..Default::default()
        };
        let scorer = Scorer::new(&g, &s, &tp, &c).unwrap();
        for (i, j, w) in g.edges() {
            for next in [None, Some(1), Some(2)] {
                let direct = step_score(&g, i, j, 4, &s, &tp, next, &c).unwrap();
                let cached = scorer.score(i, j, w, 4, next);
                assert_eq!(direct, cached);
            }
        }
    }

    #[test]
    fn contributions_sum_to_total() {
        let b = ScoreBreakdown::combine(&TraversalConfig::default(), 0.4, 0.1, 0.3, 0.2, 0.0);
        let c = b.contributions(&TraversalConfig::default());
        assert!((c.iter().sum::<f64>() - b.total).abs() < 1e-12);
        assert!((b.total - (0.4 - 0.5 - 3.0 - 2.0)).abs() < 1e-12);
    }
}
