use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{MovieBundle, SceneRecord, TrailerShot};
use crate::model::{ShotRecord, NUM_TPS};

/// Relative positions of the turning points in a synthetic movie.
const TP_AT: [f64; NUM_TPS] = [0.1, 0.25, 0.5, 0.75, 0.9];

/// A seeded, fully populated bundle for demos and tests: drifting
/// embeddings, sentiment, turning-point scores and gold sets, scenes,
/// trailer shots with silver labels, and two official trailers.
pub fn synthetic_bundle(movie_id: &str, n_shots: usize, dim: usize, seed: u64) -> MovieBundle {
    assert!(n_shots >= 2 && dim >= 1, "need >= 2 shots and dim >= 1");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut state: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let tp_pos: Vec<usize> = TP_AT
        .iter()
        .map(|p| ((p * n_shots as f64) as usize).min(n_shots - 1))
        .collect();

    let mut t = 0.0;
    let mut shots = Vec::with_capacity(n_shots);
    for i in 0..n_shots {
        for x in &mut state {
            *x += rng.gen_range(-0.4..0.4);
        }
        let len = rng.gen_range(1.0..6.0);
        let mut s = ShotRecord::new(i, t, t + len, state.clone());
        t += len;
        let neg: f64 = rng.gen_range(0.0..0.6);
        let pos: f64 = rng.gen_range(0.0..(1.0 - neg));
        s.sentiment = Some([neg, 1.0 - neg - pos, pos]);
        let mut tp = [0.0; NUM_TPS];
        for (k, v) in tp.iter_mut().enumerate() {
            let d = (i as f64 - tp_pos[k] as f64) / (n_shots as f64 * 0.03).max(1.0);
            *v = ((-d * d).exp() * rng.gen_range(0.7..1.0)).clamp(0.0, 1.0);
        }
        s.tp_scores = Some(tp);
        s.thumbnail_ref = Some(format!("{movie_id}/shot-{i:04}.jpg"));
        shots.push(s);
    }

    let mut shot_to_scene = Vec::with_capacity(n_shots);
    let mut scene = 0;
    let mut left = rng.gen_range(1..=4);
    for _ in 0..n_shots {
        if left == 0 {
            scene += 1;
            left = rng.gen_range(1..=4);
        }
        shot_to_scene.push(scene);
        left -= 1;
    }
    let scenes: Vec<SceneRecord> = (0..=scene)
        .map(|id| {
            let members: Vec<usize> = (0..n_shots).filter(|&s| shot_to_scene[s] == id).collect();
            let sentences = members
                .iter()
                .map(|&s| shots[s].embedding.iter().map(|x| x + rng.gen_range(-0.05..0.05)).collect())
                .collect();
            let mut flags = [false; NUM_TPS];
            for (k, f) in flags.iter_mut().enumerate() {
                *f = members.contains(&tp_pos[k]);
            }
            SceneRecord {
                id,
                sentences,
                tp_flags: Some(flags),
                sentiment: shots[members[0]].sentiment,
            }
        })
        .collect();

    let picked: Vec<usize> = (0..n_shots).filter(|_| rng.gen_bool(0.2)).collect();
    let trailer_shots = picked
        .iter()
        .map(|&s| TrailerShot {
            embedding: shots[s].embedding.iter().map(|x| x + rng.gen_range(-0.01..0.01)).collect(),
            duration_s: rng.gen_range(0.5..3.0),
        })
        .collect();
    for s in &mut shots {
        s.is_trailer = Some(picked.contains(&s.id));
    }
    let mut second: Vec<usize> = picked.iter().copied().filter(|_| rng.gen_bool(0.7)).collect();
    second.extend((0..n_shots).filter(|_| rng.gen_bool(0.05)));

    let mut b = MovieBundle::new(movie_id, dim, shots);
    b.scenes = Some(scenes);
    b.shot_to_scene = Some(shot_to_scene);
    b.trailer_shots = Some(trailer_shots);
    b.tp_gold = Some(std::array::from_fn(|k| vec![tp_pos[k]]));
    b.trailers = Some(vec![picked, second].into_iter().filter(|t| !t.is_empty()).collect());
    b.notes.push(format!("synthetic, seed {seed}"));
    b
}
