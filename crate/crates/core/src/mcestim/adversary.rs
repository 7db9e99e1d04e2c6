use rayon::prelude::*;

use super::misclassified;
use crate::riskexact::{golden_min, LearnedFunction};

/// Golden-section iterations when refining a grid minimum.
const REFINE_ITERATIONS: usize = 40;

/// Grid minima above this multiple of the local variation cannot hide a
/// sign change and are not refined.
const PROBE_FACTOR: f64 = 4.0;

/// Precomputed adversary for one function and one epsilon.
///
/// The function is sampled on a global grid over [-1, 1] with spacing
/// `2 epsilon / inner_grid`; every grid local minimum is refined by
/// golden-section search over its two neighbouring cells. A prefix count of
/// non-positive refined values answers "is there a misclassified point among
/// the fully contained cells of this ball" in constant time; the partially
/// covered cells at the two ball edges are searched directly.
#[derive(Debug, Clone)]
pub struct AdversaryIndex {
    epsilon: f64,
    spacing: f64,
    values: Vec<f64>,
    /// `prefix[j]` counts refined minima at indices `< j` that are <= 0.
    prefix: Vec<u32>,
}

impl AdversaryIndex {
    pub fn build(f: &LearnedFunction, epsilon: f64, inner_grid: usize) -> Self {
        let spacing = 2.0 * epsilon / inner_grid.max(2) as f64;
        let count = (2.0 / spacing).ceil() as usize + 1;
        let xs = |j: usize| (-1.0 + j as f64 * spacing).min(1.0);
        let values: Vec<f64> = (0..count).into_par_iter().map(|j| f.eval(xs(j))).collect();
        let refined_hit: Vec<bool> = (0..count)
            .into_par_iter()
            .map(|j| {
                let v = values[j];
                if misclassified(v) {
                    return true;
                }
                if j == 0 || j + 1 == count {
                    return false;
                }
                let (l, r) = (values[j - 1], values[j + 1]);
                if !(v <= l && v <= r) || v > PROBE_FACTOR * (l.max(r) - v) {
                    return false;
                }
                let (_, m) = golden_min(|x| f.eval(x), xs(j - 1), xs(j + 1), REFINE_ITERATIONS);
                misclassified(m)
            })
            .collect();
        let mut prefix = Vec::with_capacity(count + 1);
        let mut acc = 0u32;
        prefix.push(0);
        for hit in refined_hit {
            acc += u32::from(hit);
            prefix.push(acc);
        }
        Self {
            epsilon,
            spacing,
            values,
            prefix,
        }
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    /// True when some point within `epsilon` of `x` (inside [-1, 1]) is
    /// misclassified. The test point itself is always checked.
    pub fn attack(&self, f: &LearnedFunction, x: f64) -> bool {
        if misclassified(f.eval(x)) {
            return true;
        }
        let lo = (x - self.epsilon).max(-1.0);
        let hi = (x + self.epsilon).min(1.0);
        let last = self.values.len() - 1;
        let jlo = (((lo + 1.0) / self.spacing).ceil() as usize).min(last);
        let jhi = (((hi + 1.0) / self.spacing).floor() as usize).min(last);
        let grid_x = |j: usize| (-1.0 + j as f64 * self.spacing).min(1.0);
        if jhi < jlo + 2 || grid_x(jlo) < lo || grid_x(jhi) > hi {
            return search_segment(f, lo, hi);
        }
        // Refined minima with both neighbour cells inside the ball.
        if self.prefix[jhi] > self.prefix[jlo + 1] {
            return true;
        }
        if misclassified(self.values[jlo]) || misclassified(self.values[jhi]) {
            return true;
        }
        search_segment(f, lo, grid_x(jlo + 1)) || search_segment(f, grid_x(jhi - 1), hi)
    }
}

/// Direct search of a short segment: endpoints, midpoint, and a golden-section
/// probe when the samples do not rule out a dip.
fn search_segment(f: &LearnedFunction, lo: f64, hi: f64) -> bool {
    if hi <= lo {
        return misclassified(f.eval(lo));
    }
    let (a, m, b) = (f.eval(lo), f.eval(0.5 * (lo + hi)), f.eval(hi));
    if misclassified(a) || misclassified(m) || misclassified(b) {
        return true;
    }
    let low = a.min(m).min(b);
    if low > PROBE_FACTOR * (a.max(m).max(b) - low) {
        return false;
    }
    let (_, v) = golden_min(|t| f.eval(t), lo, hi, REFINE_ITERATIONS);
    misclassified(v)
}
