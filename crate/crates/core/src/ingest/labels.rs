use super::IngestError;
use crate::linalg::cosine;

/// For each trailer shot, the movie shot of highest cosine similarity when
/// that similarity reaches `threshold` (earlier movie shot on ties).
pub fn silver_matches<M: AsRef<[f64]>, T: AsRef<[f64]>>(
    movie: &[M],
    trailer: &[T],
    threshold: f64,
) -> Result<Vec<Option<usize>>, IngestError> {
    if trailer.is_empty() {
        return Err(IngestError::EmptyTrailer);
    }
    if !threshold.is_finite() {
        return Err(IngestError::Threshold(threshold));
    }
    if movie.is_empty() {
        return Err(IngestError::EmptySequence("movie"));
    }
    let dim = movie[0].as_ref().len();
    for (i, m) in movie.iter().enumerate() {
        if m.as_ref().len() != dim {
            return Err(IngestError::Dimension {
                field: format!("shots[{i}].embedding"),
                expected: dim,
                found: m.as_ref().len(),
            });
        }
    }
    trailer
        .iter()
        .enumerate()
        .map(|(i, t)| {
            let t = t.as_ref();
            if t.len() != dim {
                return Err(IngestError::Dimension {
                    field: format!("trailer_shots[{i}].embedding"),
                    expected: dim,
                    found: t.len(),
                });
            }
            let mut best: Option<(usize, f64)> = None;
            for (j, m) in movie.iter().enumerate() {
                let sim = cosine(t, m.as_ref());
                if best.is_none_or(|(_, b)| sim > b) {
                    best = Some((j, sim));
                }
            }
            Ok(best.filter(|&(_, sim)| sim >= threshold).map(|(j, _)| j))
        })
        .collect()
}

/// Movie shots matched by at least one trailer shot.
pub fn silver_trailer_labels<M: AsRef<[f64]>, T: AsRef<[f64]>>(
    movie: &[M],
    trailer: &[T],
    threshold: f64,
) -> Result<Vec<bool>, IngestError> {
    let mut labels = vec![false; movie.len()];
    for j in silver_matches(movie, trailer, threshold)?.into_iter().flatten() {
        labels[j] = true;
    }
    Ok(labels)
}

/// Copies each scene's label onto every shot of that scene.
pub fn project_scene_labels<L: Clone>(scene_labels: &[L], shot_to_scene: &[usize]) -> Result<Vec<L>, IngestError> {
    shot_to_scene
        .iter()
        .enumerate()
        .map(|(shot, &scene)| scene_labels.get(scene).cloned().ok_or(IngestError::ShotWithoutScene(shot)))
        .collect()
}
