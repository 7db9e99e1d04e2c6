use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Largest feature count accepted, to keep design matrices addressable.
const MAX_FEATURES: f64 = 1.0e9;

/// Bilevel diagonal weighting: weight `lambda1` on the constant feature and
/// `lambda_l` on each of the other `feature_count - 1` features.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BilevelEnsemble {
    pub n: usize,
    pub p: f64,
    pub q: f64,
    pub feature_count: usize,
    pub gamma: f64,
    pub lambda1: f64,
    pub lambda_l: f64,
}

/// Smallest `B >= n^p` with `(B - 1)` a multiple of `2n`.
pub fn adjusted_feature_count(n: usize, p: f64) -> Result<usize> {
    if n < 2 {
        return Err(invalid(format!("n must be at least 2, got {n}")));
    }
    if !(p > 1.0) || !p.is_finite() {
        return Err(invalid(format!("p must exceed 1, got {p}")));
    }
    let target = (n as f64).powf(p);
    if target > MAX_FEATURES {
        return Err(invalid(format!("n^p = {target:e} features is too large")));
    }
    // Guard against powf landing a hair above an exact integer.
    let min_b = (target * (1.0 - 1e-13)).ceil() as usize;
    let step = 2 * n;
    let blocks = min_b.saturating_sub(1).div_ceil(step);
    Ok(1 + step * blocks.max(1))
}

/// Builds the bilevel ensemble with the adjusted feature count.
pub fn build_ensemble(n: usize, p: f64, q: f64) -> Result<BilevelEnsemble> {
    let b = adjusted_feature_count(n, p)?;
    BilevelEnsemble::with_feature_count(n, p, q, b)
}

impl BilevelEnsemble {
    /// Builds the ensemble with an explicit feature count. The count need not
    /// satisfy the alias divisibility condition; `alias_count` is then `None`.
    pub fn with_feature_count(n: usize, p: f64, q: f64, feature_count: usize) -> Result<Self> {
        if n < 2 {
            return Err(invalid(format!("n must be at least 2, got {n}")));
        }
        if !(p > 1.0) || !p.is_finite() {
            return Err(invalid(format!("p must exceed 1, got {p}")));
        }
        if !(q >= 0.0) || !q.is_finite() {
            return Err(invalid(format!("q must be non-negative, got {q}")));
        }
        if feature_count <= n {
            return Err(invalid(format!(
                "feature count {feature_count} must exceed n = {n}"
            )));
        }
        let bf = feature_count as f64;
        let gamma = (n as f64).powf(-q);
        Ok(Self {
            n,
            p,
            q,
            feature_count,
            gamma,
            lambda1: gamma * bf,
            lambda_l: (1.0 - gamma) * bf / (bf - 1.0),
        })
    }

    /// `(B - 1) / (2n)` as a real number.
    pub fn alias_ratio(&self) -> f64 {
        (self.feature_count as f64 - 1.0) / (2.0 * self.n as f64)
    }

    /// Number of aliases `N_A` when `(B - 1)` is a multiple of `2n`.
    pub fn alias_count(&self) -> Option<usize> {
        let m = self.feature_count - 1;
        m.is_multiple_of(2 * self.n).then(|| m / (2 * self.n))
    }

    /// Oscillation half-order `h = (B - 1 + n) / 2` of the Dirichlet form.
    pub fn half_order(&self) -> f64 {
        (self.feature_count as f64 - 1.0 + self.n as f64) / 2.0
    }

    /// Diagonal weights in Fourier-map order.
    pub fn weights(&self) -> Vec<f64> {
        let mut w = vec![self.lambda_l; self.feature_count];
        w[0] = self.lambda1;
        w
    }

    /// `lambda1 + (B - 1) lambda_l`, equal to `B`.
    pub fn trace(&self) -> f64 {
        self.lambda1 + (self.feature_count as f64 - 1.0) * self.lambda_l
    }
}
