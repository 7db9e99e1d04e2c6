use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// ChaCha stream reserved for training-point draws.
const TRAINING_STREAM: u64 = 1 << 62;

/// Requested placement of training points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LayoutKind {
    Grid,
    Random,
}

/// Placement actually used, including the seed for random draws.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "layout", rename_all = "snake_case")]
pub enum Layout {
    RegularGrid,
    UniformRandom { seed: u64 },
}

/// Training inputs in [-1, 1] with constant +1 labels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingSet {
    pub points: Vec<f64>,
    pub labels: Vec<f64>,
    pub layout: Layout,
}

impl TrainingSet {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Distance from `x` to the closest training point. Points are sorted.
    pub fn nearest_distance(&self, x: f64) -> f64 {
        let idx = self.points.partition_point(|&p| p < x);
        let mut best = f64::INFINITY;
        if idx < self.points.len() {
            best = best.min((self.points[idx] - x).abs());
        }
        if idx > 0 {
            best = best.min((x - self.points[idx - 1]).abs());
        }
        best
    }
}

/// Regular grid `x_i = -1 + 2i/n` (i = 1..n) or `n` sorted uniform draws.
pub fn make_training_set(n: usize, layout: LayoutKind, seed: Option<u64>) -> Result<TrainingSet> {
    if n < 2 {
        return Err(invalid(format!("n must be at least 2, got {n}")));
    }
    let (points, layout) = match layout {
        LayoutKind::Grid => (
            (1..=n).map(|i| -1.0 + 2.0 * i as f64 / n as f64).collect(),
            Layout::RegularGrid,
        ),
        LayoutKind::Random => {
            let seed = seed.ok_or(Error::MissingSeed)?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(TRAINING_STREAM);
            let mut pts: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..=1.0)).collect();
            pts.sort_by(f64::total_cmp);
            (pts, Layout::UniformRandom { seed })
        }
    };
    Ok(TrainingSet {
        labels: vec![1.0; n],
        points,
        layout,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_points() {
        let t = make_training_set(4, LayoutKind::Grid, None).unwrap();
        assert_eq!(t.points, vec![-0.5, 0.0, 0.5, 1.0]);
        assert_eq!(t.labels, vec![1.0; 4]);
    }

    #[test]
    fn random_points() {
        let t = make_training_set(100, LayoutKind::Random, Some(3)).unwrap();
        assert!(t.points.iter().all(|x| (-1.0..=1.0).contains(x)));
        assert!(t.labels.iter().all(|&y| y == 1.0));
        let u = make_training_set(100, LayoutKind::Random, Some(4)).unwrap();
        assert_ne!(t.points, u.points);
        let v = make_training_set(100, LayoutKind::Random, Some(3)).unwrap();
        assert_eq!(t, v);
        assert_eq!(
            make_training_set(10, LayoutKind::Random, None),
            Err(Error::MissingSeed)
        );
    }

    #[test]
    fn nearest_distance_on_grid() {
        let t = make_training_set(4, LayoutKind::Grid, None).unwrap();
        assert!((t.nearest_distance(-1.0) - 0.5).abs() < 1e-15);
        assert!((t.nearest_distance(0.2) - 0.2).abs() < 1e-15);
        assert!((t.nearest_distance(0.9) - 0.1).abs() < 1e-15);
    }
}
