use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{golden_max, golden_min, DirichletForm, LearnedFunction};
use crate::error::{invalid, Error, Result};

/// Bisection step limit before a bracketed root is declared unresolved.
pub const MAX_BISECTION_STEPS: usize = 200;

/// Golden-section iterations used to probe hidden dips between scan points.
const DIP_PROBE_ITERATIONS: usize = 60;

/// Grid-minimum values below this multiple of the local variation are probed
/// for hidden sign changes.
const DIP_PROBE_FACTOR: f64 = 4.0;

/// Scans above this size are evaluated in parallel.
const PARALLEL_SCAN: usize = 1 << 14;

/// Sorted intervals `(l_i, r_i)` on which the function is negative.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroCrossingSet {
    pub roots: Vec<(f64, f64)>,
    pub interval: (f64, f64),
    /// True when the interval is one period and padding wraps around.
    pub periodic: bool,
    pub refinement_tol: f64,
}

impl ZeroCrossingSet {
    pub fn len(&self) -> f64 {
        self.interval.1 - self.interval.0
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }

    /// Total measure of the negative set.
    pub fn negative_measure(&self) -> f64 {
        self.roots.iter().fold(0.0, |acc, (l, r)| acc + (r - l))
    }
}

/// Scan-and-bisect root finder on `interval` for a learned function. The
/// result is not marked periodic; see [`exact_zero_crossings`].
pub fn find_zero_crossings(
    f: &LearnedFunction,
    interval: (f64, f64),
    scan_points: usize,
    tol: f64,
) -> Result<ZeroCrossingSet> {
    let len = interval.1 - interval.0;
    let lobes = f.oscillation_scale() * len / 2.0;
    if (scan_points as f64) < 4.0 * lobes {
        return Err(invalid(format!(
            "{scan_points} scan points cannot resolve {lobes:.0} lobes"
        )));
    }
    let roots = find_zero_crossings_fn(|x| f.eval(x), interval, scan_points, tol)?;
    Ok(ZeroCrossingSet {
        roots,
        interval,
        periodic: false,
        refinement_tol: tol,
    })
}

/// Zero crossings over the function's natural analysis domain: one period
/// (wrapping) for Dirichlet forms, `[-1, 1]` otherwise.
pub fn exact_zero_crossings(f: &LearnedFunction) -> Result<ZeroCrossingSet> {
    let (interval, periodic) = f.analysis_interval();
    let len = interval.1 - interval.0;
    let mut set = find_zero_crossings(f, interval, f.default_scan_points(len), 1e-12 * len)?;
    set.periodic = periodic;
    Ok(set)
}

#[derive(Clone, Copy, PartialEq)]
enum Crossing {
    Down,
    Up,
}

/// Root finder on a plain closure. Returns the negative intervals.
///
/// Sign changes between scan points are bisected. Grid minima that stay
/// non-negative but are small against the local variation are probed by
/// golden-section search, so dips narrower than the scan spacing are still
/// found; grid maxima inside negative runs are probed the same way.
pub fn find_zero_crossings_fn<F>(
    f: F,
    interval: (f64, f64),
    scan_points: usize,
    tol: f64,
) -> Result<Vec<(f64, f64)>>
where
    F: Fn(f64) -> f64 + Sync,
{
    let (lo, hi) = interval;
    if !(hi > lo) || scan_points < 3 {
        return Err(invalid(format!(
            "bad scan: interval ({lo}, {hi}) with {scan_points} points"
        )));
    }
    let step = (hi - lo) / (scan_points - 1) as f64;
    let xs: Vec<f64> = (0..scan_points)
        .map(|j| {
            if j + 1 == scan_points {
                hi
            } else {
                lo + j as f64 * step
            }
        })
        .collect();
    let vs: Vec<f64> = if scan_points >= PARALLEL_SCAN {
        xs.par_iter().map(|&x| f(x)).collect()
    } else {
        xs.iter().map(|&x| f(x)).collect()
    };
    let neg = |v: f64| v < 0.0;

    let mut events: Vec<(f64, Crossing)> = Vec::new();
    for j in 0..scan_points - 1 {
        if neg(vs[j]) != neg(vs[j + 1]) {
            let x = bisect(&f, xs[j], xs[j + 1], neg(vs[j]), tol)?;
            let dir = if neg(vs[j]) {
                Crossing::Up
            } else {
                Crossing::Down
            };
            events.push((x, dir));
        }
    }

    for j in 0..scan_points {
        let left = j.checked_sub(1).map(|i| vs[i]);
        let right = vs.get(j + 1).copied();
        let v = vs[j];
        let l = left.unwrap_or(f64::INFINITY);
        let r = right.unwrap_or(f64::INFINITY);
        let (a, b) = (xs[j.saturating_sub(1)], xs[(j + 1).min(scan_points - 1)]);
        if !neg(v) && !neg(l) && !neg(r) && v < l && v <= r {
            let spread = left.unwrap_or(v).max(right.unwrap_or(v)) - v;
            if v <= DIP_PROBE_FACTOR * spread {
                let (xm, fm) = golden_min(&f, a, b, DIP_PROBE_ITERATIONS);
                if neg(fm) {
                    events.push((bisect(&f, a, xm, false, tol)?, Crossing::Down));
                    events.push((bisect(&f, xm, b, true, tol)?, Crossing::Up));
                }
            }
        }
        let l = left.unwrap_or(f64::NEG_INFINITY);
        let r = right.unwrap_or(f64::NEG_INFINITY);
        if neg(v) && neg(l) && neg(r) && v > l && v >= r {
            let spread = v - left.unwrap_or(v).min(right.unwrap_or(v));
            if -v <= DIP_PROBE_FACTOR * spread {
                let (xm, fm) = golden_max(&f, a, b, DIP_PROBE_ITERATIONS);
                if !neg(fm) {
                    events.push((bisect(&f, a, xm, true, tol)?, Crossing::Up));
                    events.push((bisect(&f, xm, b, false, tol)?, Crossing::Down));
                }
            }
        }
    }
    events.sort_by(|p, q| p.0.total_cmp(&q.0));

    let mut roots = Vec::new();
    let mut start = if neg(vs[0]) { Some(lo) } else { None };
    for (x, dir) in events {
        match (dir, start) {
            (Crossing::Down, None) => start = Some(x),
            (Crossing::Up, Some(l)) => {
                if x > l {
                    roots.push((l, x));
                }
                start = None;
            }
            _ => {}
        }
    }
    if let Some(l) = start {
        if hi > l {
            roots.push((l, hi));
        }
    }
    Ok(roots)
}

/// Bisection on `[a, b]` where the sign at `a` is `a_negative` and the sign at
/// `b` is the opposite.
fn bisect<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, a_negative: bool, tol: f64) -> Result<f64> {
    let (mut lo, mut hi) = (a, b);
    for _ in 0..MAX_BISECTION_STEPS {
        if hi - lo <= tol {
            return Ok(0.5 * (lo + hi));
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            return Ok(mid);
        }
        let v = f(mid);
        if v == 0.0 {
            return Ok(mid);
        }
        if (v < 0.0) == a_negative {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Err(Error::UnresolvedRoot {
        lo,
        hi,
        iterations: MAX_BISECTION_STEPS,
    })
}

/// Indices of the negative Dirichlet lobes (counted from the training point at
/// the origin, on the positive side) that contain a negative interval.
pub fn crossing_lobes(set: &ZeroCrossingSet, form: &DirichletForm) -> Vec<usize> {
    let h = form.half_order();
    let mut lobes: Vec<usize> = set
        .roots
        .iter()
        .map(|&(l, r)| 0.5 * (l + r))
        .filter(|&m| m > 0.0)
        .map(|m| (m * h / 2.0).ceil() as usize)
        .collect();
    lobes.dedup();
    lobes
}
