use super::NumericsError;
use crate::linalg::Matrix;

fn check_mapping(mapping: &[usize], n_items: usize, n_scenes: usize) -> Result<(), NumericsError> {
    if mapping.len() != n_items {
        return Err(NumericsError::Shape(format!(
            "mapping covers {} shots, expected {n_items}",
            mapping.len()
        )));
    }
    if let Some((shot, &scene)) = mapping.iter().enumerate().find(|(_, &s)| s >= n_scenes) {
        return Err(NumericsError::BadMapping { shot, scene, n_scenes });
    }
    Ok(())
}

/// Per-scene max over member shots for every row of `probs` (rows × shots).
/// Also returns, per row and scene, the arg-max shot (smaller id on ties),
/// or `None` for scenes without shots.
/// Per row and scene, the shot that won the max (None for empty scenes).
pub type ArgMax = Vec<Vec<Option<usize>>>;

pub fn max_pool_scenes(
    probs: &Matrix,
    mapping: &[usize],
    n_scenes: usize,
) -> Result<(Matrix, ArgMax), NumericsError> {
    check_mapping(mapping, probs.cols(), n_scenes)?;
    let mut pooled = Matrix::zeros(probs.rows(), n_scenes);
    let mut arg = vec![vec![None; n_scenes]; probs.rows()];
    for r in 0..probs.rows() {
        for (shot, &scene) in mapping.iter().enumerate() {
            let p = probs[(r, shot)];
            match arg[r][scene] {
                Some(_) if p <= pooled[(r, scene)] => {}
                _ => {
                    pooled[(r, scene)] = p;
                    arg[r][scene] = Some(shot);
                }
            }
        }
    }
    Ok((pooled, arg))
}

/// Scene representation as the mean of its shots' representations.
pub fn mean_pool_scenes(reps: &Matrix, mapping: &[usize], n_scenes: usize) -> Result<Matrix, NumericsError> {
    check_mapping(mapping, reps.rows(), n_scenes)?;
    let mut out = Matrix::zeros(n_scenes, reps.cols());
    let mut counts = vec![0usize; n_scenes];
    for (shot, &scene) in mapping.iter().enumerate() {
        counts[scene] += 1;
        for (o, x) in out.row_mut(scene).iter_mut().zip(reps.row(shot)) {
            *o += x;
        }
    }
    for (scene, &c) in counts.iter().enumerate() {
        if c == 0 {
            return Err(NumericsError::EmptyScene(scene));
        }
        for o in out.row_mut(scene) {
            *o /= c as f64;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn max_pool_picks_scene_maxima() {
        let probs = Matrix::from_rows(&[[0.1, 0.4, 0.2, 0.3]]).unwrap();
        let (pooled, arg) = max_pool_scenes(&probs, &[0, 0, 1, 1], 2).unwrap();
        assert_eq!(pooled.row(0), &[0.4, 0.3]);
        assert_eq!(arg[0], vec![Some(1), Some(3)]);
    }

    #[test]
    fn identity_mapping_is_identity() {
        let probs = Matrix::from_rows(&[[0.25, 0.25, 0.25, 0.25]]).unwrap();
        let (pooled, _) = max_pool_scenes(&probs, &[0, 1, 2, 3], 4).unwrap();
        assert_eq!(pooled, probs);
        let reps = Matrix::from_rows(&[[1.0, 2.0], [3.0, 4.0]]).unwrap();
        assert_eq!(mean_pool_scenes(&reps, &[0, 1], 2).unwrap(), reps);
    }

    #[test]
    fn mean_pool_averages_members() {
        let reps = Matrix::from_rows(&[[1.0, 0.0], [3.0, 2.0], [5.0, 5.0]]).unwrap();
        let out = mean_pool_scenes(&reps, &[0, 0, 1], 2).unwrap();
        assert_eq!(out.row(0), &[2.0, 1.0]);
        assert_eq!(out.row(1), &[5.0, 5.0]);
    }

    #[test]
    fn bad_mappings_error() {
        let reps = Matrix::zeros(2, 2);
        assert!(matches!(
            mean_pool_scenes(&reps, &[0, 3], 2),
            Err(NumericsError::BadMapping { shot: 1, scene: 3, .. })
        ));
        assert!(matches!(mean_pool_scenes(&reps, &[0], 2), Err(NumericsError::Shape(_))));
        assert_eq!(mean_pool_scenes(&reps, &[0, 0], 2), Err(NumericsError::EmptyScene(1)));
    }
}
