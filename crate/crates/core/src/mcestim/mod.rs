//! Monte Carlo risk estimators, the exhaustive 1-D adversary, distance CDFs of
//! misclassified points and alias statistics of effective coefficients.

mod adversary;
mod diagnostics;

pub use adversary::AdversaryIndex;
pub use diagnostics::{
    alias_statistics, ks_distance, misclassified_distance_cdf, percentile, AliasStats, DistanceCdf,
    CDF_THRESHOLDS,
};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::riskexact::LearnedFunction;

/// Smallest accepted test-set size.
pub const MIN_TEST_POINTS: usize = 1000;

/// How test points are drawn from Unif[-1, 1].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sampling {
    /// One uniform point in each of `n_test` equal cells.
    Stratified,
    /// Independent uniform points.
    Iid,
}

/// Monte Carlo configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McConfig {
    pub n_test: usize,
    /// Adversary grid points per epsilon-ball; 0 selects
    /// `8 ceil(epsilon * scale)` with `scale` the function's oscillation scale.
    pub inner_grid: usize,
    pub seed: u64,
    /// Test points per RNG stream; batches are the unit of parallel work.
    pub batch: usize,
    pub sampling: Sampling,
}

impl McConfig {
    pub fn new(n_test: usize, seed: u64) -> Self {
        Self {
            n_test,
            inner_grid: 0,
            seed,
            batch: 1024,
            sampling: Sampling::Stratified,
        }
    }

    pub fn with_sampling(mut self, sampling: Sampling) -> Self {
        self.sampling = sampling;
        self
    }

    pub fn with_inner_grid(mut self, inner_grid: usize) -> Self {
        self.inner_grid = inner_grid;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.n_test < MIN_TEST_POINTS {
            return Err(invalid(format!(
                "n_test must be at least {MIN_TEST_POINTS}, got {}",
                self.n_test
            )));
        }
        if self.batch == 0 {
            return Err(invalid("batch size must be positive"));
        }
        Ok(())
    }

    fn batches(&self) -> usize {
        self.n_test.div_ceil(self.batch)
    }

    /// Test points of batch `index`, drawn from ChaCha stream `index`.
    pub fn batch_points(&self, index: usize) -> Vec<f64> {
        let start = index * self.batch;
        let end = ((index + 1) * self.batch).min(self.n_test);
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(index as u64);
        (start..end)
            .map(|i| {
                let u: f64 = rng.random();
                match self.sampling {
                    Sampling::Stratified => -1.0 + 2.0 * (i as f64 + u) / self.n_test as f64,
                    Sampling::Iid => -1.0 + 2.0 * u,
                }
            })
            .collect()
    }

    /// All test points in index order.
    pub fn test_points(&self) -> Vec<f64> {
        (0..self.batches())
            .flat_map(|b| self.batch_points(b))
            .collect()
    }

    /// Adversary grid points per ball for `epsilon` on `f`.
    pub fn resolved_inner_grid(&self, f: &LearnedFunction, epsilon: f64) -> usize {
        if self.inner_grid > 0 {
            self.inner_grid
        } else {
            (8 * (epsilon * f.oscillation_scale()).ceil() as usize).max(16)
        }
    }
}

/// Point estimate with binomial standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub estimate: f64,
    pub stderr: f64,
    pub n_test: usize,
}

impl Estimate {
    fn from_count(hits: usize, total: usize) -> Self {
        let p = hits as f64 / total as f64;
        Self {
            estimate: p,
            stderr: (p * (1.0 - p) / total as f64).sqrt(),
            n_test: total,
        }
    }
}

/// A value counts as misclassified unless it is strictly positive.
pub(crate) fn misclassified(v: f64) -> bool {
    !(v > 0.0)
}

/// Fraction of uniform test points where the sign of `f` is not +1.
pub fn mc_classification_risk(f: &LearnedFunction, cfg: &McConfig) -> Result<Estimate> {
    cfg.validate()?;
    let hits: usize = (0..cfg.batches())
        .into_par_iter()
        .map(|b| {
            cfg.batch_points(b)
                .into_iter()
                .filter(|&x| misclassified(f.eval(x)))
                .count()
        })
        .sum();
    Ok(Estimate::from_count(hits, cfg.n_test))
}

/// Fraction of uniform test points with a misclassified point within
/// `epsilon` (balls clipped to [-1, 1]).
pub fn mc_adversarial_risk(f: &LearnedFunction, epsilon: f64, cfg: &McConfig) -> Result<Estimate> {
    cfg.validate()?;
    if !(epsilon >= 0.0) {
        return Err(invalid(format!(
            "epsilon must be non-negative, got {epsilon}"
        )));
    }
    if epsilon == 0.0 {
        return mc_classification_risk(f, cfg);
    }
    let inner = cfg.resolved_inner_grid(f, epsilon);
    let required = 2 * (epsilon * f.oscillation_scale()).ceil() as usize;
    if inner < required {
        return Err(invalid(format!(
            "inner grid {inner} cannot resolve the lobes in an epsilon-ball (needs {required})"
        )));
    }
    let index = AdversaryIndex::build(f, epsilon, inner);
    let hits: usize = (0..cfg.batches())
        .into_par_iter()
        .map(|b| {
            cfg.batch_points(b)
                .into_iter()
                .filter(|&x| index.attack(f, x))
                .count()
        })
        .sum();
    Ok(Estimate::from_count(hits, cfg.n_test))
}

/// Limit `1 - 1/e` of the adversarial risk with uniformly random training
/// points (each test ball hits a training point's dip with this probability).
pub fn balls_and_bins_prediction() -> f64 {
    1.0 - (-1.0f64).exp()
}
