use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{misclassified, McConfig};
use crate::error::Result;
use crate::featurelift::{alias_indices, TrainingSet};
use crate::riskexact::LearnedFunction;

/// CDF thresholds in units of `1/n`.
pub const CDF_THRESHOLDS: [f64; 20] = [
    0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0, 1.1, 1.2, 1.3, 1.4, 1.5, 1.6, 1.7, 1.8, 1.9,
    2.0,
];

/// Distances of misclassified test points to the nearest training point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceCdf {
    /// Sorted distances in units of `1/n`.
    pub distances: Vec<f64>,
    /// `(threshold, fraction of distances <= threshold)`.
    pub cdf: Vec<(f64, f64)>,
    pub n_test: usize,
}

impl DistanceCdf {
    pub fn from_distances(mut distances: Vec<f64>, n_test: usize) -> Self {
        distances.sort_by(f64::total_cmp);
        let total = distances.len();
        let cdf = CDF_THRESHOLDS
            .iter()
            .map(|&t| {
                let below = distances.partition_point(|&d| d <= t);
                (
                    t,
                    if total == 0 {
                        0.0
                    } else {
                        below as f64 / total as f64
                    },
                )
            })
            .collect();
        Self {
            distances,
            cdf,
            n_test,
        }
    }

    /// Empirical CDF of the distances at `t`.
    pub fn fraction_within(&self, t: f64) -> f64 {
        if self.distances.is_empty() {
            return 0.0;
        }
        self.distances.partition_point(|&d| d <= t) as f64 / self.distances.len() as f64
    }
}

/// Distance CDF of the misclassified test points of `cfg`.
pub fn misclassified_distance_cdf(
    f: &LearnedFunction,
    train: &TrainingSet,
    cfg: &McConfig,
) -> Result<DistanceCdf> {
    cfg.validate()?;
    let scale = train.len() as f64;
    let distances: Vec<f64> = (0..cfg.batches())
        .into_par_iter()
        .flat_map_iter(|b| {
            cfg.batch_points(b)
                .into_iter()
                .filter(|&x| misclassified(f.eval(x)))
                .map(|x| train.nearest_distance(x) * scale)
                .collect::<Vec<_>>()
        })
        .collect();
    Ok(DistanceCdf::from_distances(distances, cfg.n_test))
}

/// Two-sample Kolmogorov-Smirnov distance between the empirical distance
/// distributions. Returns 1 when exactly one sample is empty, 0 when both are.
pub fn ks_distance(a: &DistanceCdf, b: &DistanceCdf) -> f64 {
    match (a.distances.is_empty(), b.distances.is_empty()) {
        (true, true) => return 0.0,
        (true, false) | (false, true) => return 1.0,
        _ => {}
    }
    let (xa, xb) = (&a.distances, &b.distances);
    let (na, nb) = (xa.len() as f64, xb.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut best = 0.0f64;
    while i < xa.len() && j < xb.len() {
        let t = xa[i].min(xb[j]);
        while i < xa.len() && xa[i] <= t {
            i += 1;
        }
        while j < xb.len() && xb[j] <= t {
            j += 1;
        }
        best = best.max((i as f64 / na - j as f64 / nb).abs());
    }
    best
}

/// Summary of effective Fourier coefficients against the alias structure.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AliasStats {
    pub avg_alias_weight: f64,
    pub alias_p30: f64,
    pub alias_p70: f64,
    /// Sum of squares over indices that are neither constant nor alias.
    pub non_alias_energy: f64,
}

/// Percentile with linear interpolation between order statistics.
pub fn percentile(values: &[f64], pct: f64) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let pos = pct / 100.0 * (v.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    v[lo] + (pos - lo as f64) * (v[hi] - v[lo])
}

/// Alias statistics of `alpha_eff` for the regular grid of size `n`.
pub fn alias_statistics(alpha_eff: &[f64], n: usize, feature_count: usize) -> AliasStats {
    let idx = alias_indices(n, feature_count);
    let vals: Vec<f64> = idx.iter().map(|&j| alpha_eff[j]).collect();
    let mut is_alias = vec![false; feature_count];
    for &j in &idx {
        is_alias[j] = true;
    }
    let non_alias_energy = alpha_eff
        .iter()
        .enumerate()
        .skip(1)
        .filter(|(j, _)| !is_alias[*j])
        .map(|(_, a)| a * a)
        .sum();
    AliasStats {
        avg_alias_weight: if vals.is_empty() {
            f64::NAN
        } else {
            vals.iter().sum::<f64>() / vals.len() as f64
        },
        alias_p30: percentile(&vals, 30.0),
        alias_p70: percentile(&vals, 70.0),
        non_alias_energy,
    }
}
