use serde::{Deserialize, Serialize};

use crate::ingest::MovieBundle;
use crate::model::{section_sizes, NUM_TPS};

pub const THEMATIC_UNITS: [&str; 6] = [
    "setup",
    "new situation",
    "progress",
    "complications",
    "final push",
    "aftermath",
];

/// Unit index of `shot` given the five turning-point positions: the number
/// of positions at or before it.
pub fn thematic_unit(shot: usize, tp_positions: &[usize; NUM_TPS]) -> usize {
    tp_positions.iter().filter(|&&p| p <= shot).count()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub movies: usize,
    pub trailers: usize,
    /// Percent of trailer shots per thematic unit.
    pub thematic_units: Option<[f64; 6]>,
    /// Percent of trailers containing at least one gold shot of each turning point.
    pub tp_coverage: Option<[Option<f64>; NUM_TPS]>,
    /// Mean absolute sentiment per trailer third.
    pub sentiment_thirds: Option<[f64; 3]>,
    /// Percent of trailers whose middle third is the least intense.
    pub v_shape: Option<f64>,
    pub omissions: Vec<String>,
}

/// Corpus-level accumulation of [`AnalysisReport`] figures.
#[derive(Debug, Clone, Default)]
pub struct AnalysisAccumulator {
    movies: usize,
    trailers: usize,
    unit_counts: [usize; 6],
    tp_hits: [usize; NUM_TPS],
    tp_trailers: [usize; NUM_TPS],
    third_sums: [f64; 3],
    third_trailers: usize,
    v_trailers: usize,
    omissions: Vec<String>,
}

fn trailers_of(bundle: &MovieBundle) -> Option<Vec<Vec<usize>>> {
    if let Some(t) = &bundle.trailers {
        return Some(t.clone());
    }
    bundle
        .trailer_labels()
        .map(|labels| vec![labels.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i).collect()])
}

impl AnalysisAccumulator {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, bundle: &MovieBundle) -> &mut Self {
        self.movies += 1;
        let id = &bundle.movie_id;
        let Some(trailers) = trailers_of(bundle) else {
            self.omissions.push(format!("{id}: no trailer shots or silver labels"));
            return self;
        };
        let trailers: Vec<Vec<usize>> = trailers.into_iter().filter(|t| !t.is_empty()).collect();
        self.trailers += trailers.len();

        match &bundle.tp_gold {
            None => self.omissions.push(format!("{id}: no gold turning points")),
            Some(gold) => {
                let positions: Option<Vec<usize>> = gold.iter().map(|s| s.iter().min().copied()).collect();
                match positions {
                    Some(p) => {
                        let p: [usize; NUM_TPS] = p.try_into().expect("five positions");
                        for t in &trailers {
                            for &s in t {
                                self.unit_counts[thematic_unit(s, &p)] += 1;
                            }
                        }
                    }
                    None => self
                        .omissions
                        .push(format!("{id}: thematic units need a gold shot for every turning point")),
                }
                for (tp, set) in gold.iter().enumerate() {
                    if set.is_empty() {
                        continue;
                    }
                    for t in &trailers {
                        self.tp_trailers[tp] += 1;
                        if t.iter().any(|s| set.contains(s)) {
                            self.tp_hits[tp] += 1;
                        }
                    }
                }
            }
        }

        let mut skipped = 0;
        for t in &trailers {
            let shots: Option<Vec<f64>> = t
                .iter()
                .map(|&s| bundle.shots[s].sentiment.map(|_| bundle.shots[s].signed_sentiment().intensity()))
                .collect();
            match shots {
                Some(intensity) if intensity.len() >= 3 => {
                    let means = third_means(&intensity);
                    for (acc, m) in self.third_sums.iter_mut().zip(means) {
                        *acc += m;
                    }
                    self.third_trailers += 1;
                    if means[1] < means[0] && means[1] < means[2] {
                        self.v_trailers += 1;
                    }
                }
                _ => skipped += 1,
            }
        }
        if skipped > 0 {
            self.omissions.push(format!(
                "{id}: {skipped} trailer(s) without sentiment on every shot or shorter than 3 shots"
            ));
        }
        self
    }

    pub fn finish(&self) -> AnalysisReport {
        let units: usize = self.unit_counts.iter().sum();
        let thematic_units = (units > 0).then(|| self.unit_counts.map(|c| 100.0 * c as f64 / units as f64));
        let tp_coverage: [Option<f64>; NUM_TPS] = std::array::from_fn(|t| {
            (self.tp_trailers[t] > 0).then(|| 100.0 * self.tp_hits[t] as f64 / self.tp_trailers[t] as f64)
        });
        let n3 = self.third_trailers as f64;
        AnalysisReport {
            movies: self.movies,
            trailers: self.trailers,
            thematic_units,
            tp_coverage: tp_coverage.iter().any(Option::is_some).then_some(tp_coverage),
            sentiment_thirds: (self.third_trailers > 0).then(|| self.third_sums.map(|s| s / n3)),
            v_shape: (self.third_trailers > 0).then(|| 100.0 * self.v_trailers as f64 / n3),
            omissions: self.omissions.clone(),
        }
    }
}

fn third_means(values: &[f64]) -> [f64; 3] {
    let sizes = section_sizes(values.len());
    let mut out = [0.0; 3];
    let mut at = 0;
    for (o, n) in out.iter_mut().zip(sizes) {
        *o = values[at..at + n].iter().sum::<f64>() / n as f64;
        at += n;
    }
    out
}

/// Report for a single movie.
pub fn analysis_stats(bundle: &MovieBundle) -> AnalysisReport {
    AnalysisAccumulator::new().add(bundle).finish()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ShotRecord;

    fn bundle(n: usize) -> MovieBundle {
        let shots = (0..n)
            .map(|i| ShotRecord::new(i, i as f64, i as f64 + 1.0, vec![1.0]))
            .collect();
        MovieBundle::new("m", 1, shots)
    }

    fn set_sentiment(b: &mut MovieBundle, intensities: &[(usize, f64)]) {
        for &(s, x) in intensities {
            b.shots[s].sentiment = Some([0.0, 1.0 - x, x]);
        }
    }

    #[test]
    fn unit_of_shot() {
        let p = [10, 20, 30, 40, 50];
        assert_eq!(thematic_unit(0, &p), 0);
        assert_eq!(thematic_unit(10, &p), 1);
        assert_eq!(thematic_unit(49, &p), 4);
        assert_eq!(thematic_unit(99, &p), 5);
    }

    #[test]
    fn everything_before_first_tp_is_setup() {
        let mut b = bundle(60);
        b.tp_gold = Some([vec![10], vec![20], vec![30], vec![40], vec![50]]);
        b.trailers = Some(vec![vec![1, 2, 3], vec![4, 5]]);
        let r = analysis_stats(&b);
        assert_eq!(r.thematic_units.unwrap(), [100.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        assert_eq!(r.tp_coverage.unwrap(), [Some(0.0); 5]);
    }

    #[test]
    fn v_shape_from_section_means() {
        let mut b = bundle(9);
        set_sentiment(&mut b, &[(0, 0.7), (1, 0.7), (2, 0.1), (3, 0.1), (4, 0.9), (5, 0.9)]);
        b.trailers = Some(vec![vec![0, 1, 2, 3, 4, 5]]);
        let r = analysis_stats(&b);
        let m = r.sentiment_thirds.unwrap();
        assert!((m[0] - 0.7).abs() < 1e-12 && (m[1] - 0.1).abs() < 1e-12 && (m[2] - 0.9).abs() < 1e-12);
        assert_eq!(r.v_shape, Some(100.0));
        assert!(r.thematic_units.is_none());
        assert!(!r.omissions.is_empty());
    }

    #[test]
    fn hand_computed_corpus() {
        // movie a: TPs at 2,4,6,8,10; trailers {1,3,9} and {3,5,11,12}
        let mut a = bundle(14);
        a.movie_id = "a".into();
        a.tp_gold = Some([vec![2], vec![4], vec![6], vec![8], vec![10, 11]]);
        a.trailers = Some(vec![vec![1, 3, 9], vec![3, 5, 11, 12]]);
        set_sentiment(&mut a, &[(1, 0.6), (3, 0.2), (9, 0.8), (5, 0.5), (11, 0.1), (12, 0.4)]);
        // movie b: silver labels on 0 and 7, no gold, no sentiment
        let mut b = bundle(8);
        b.movie_id = "b".into();
        for s in &mut b.shots {
            s.is_trailer = Some(s.id == 0 || s.id == 7);
        }
        let mut acc = AnalysisAccumulator::new();
        acc.add(&a).add(&b);
        let r = acc.finish();
        assert_eq!(r.movies, 2);
        assert_eq!(r.trailers, 3);
        // units of a's 7 trailer shots: 1→0, 3→1, 9→4, 3→1, 5→2, 11→5, 12→5
        let u = r.thematic_units.unwrap();
        let want = [1.0, 2.0, 1.0, 0.0, 1.0, 2.0].map(|c: f64| 100.0 * c / 7.0);
        for (x, y) in u.iter().zip(want) {
            assert!((x - y).abs() < 1e-9);
        }
        assert!((u.iter().sum::<f64>() - 100.0).abs() < 0.01);
        // TP2 (shot 4) in neither trailer; TP5 {10,11} in the second
        let cov = r.tp_coverage.unwrap();
        assert_eq!(cov, [Some(0.0), Some(0.0), Some(0.0), Some(0.0), Some(50.0)]);
        // thirds: (0.6 | 0.2 | 0.8) V; (0.2 | 0.5 | 0.1, 0.4 → 0.25) not V
        let m = r.sentiment_thirds.unwrap();
        assert!((m[0] - 0.4).abs() < 1e-12);
        assert!((m[1] - 0.35).abs() < 1e-12);
        assert!((m[2] - 0.525).abs() < 1e-12);
        assert_eq!(r.v_shape, Some(50.0));
        assert!(r.omissions.iter().any(|o| o.starts_with("b:")));
    }
}
