use super::ZeroCrossingSet;

/// Fraction of the analysis interval on which the function is negative.
/// On `[-1, 1]` this is `(1/2) sum (r_i - l_i)`; on one period it is the
/// per-period measure times `n/2`.
pub fn classification_risk(set: &ZeroCrossingSet) -> f64 {
    (set.negative_measure() / set.len()).min(1.0)
}

/// Measure fraction of points within `epsilon` of a negative interval.
pub fn adversarial_risk(set: &ZeroCrossingSet, epsilon: f64) -> f64 {
    let measure = padded_intervals(set, epsilon)
        .iter()
        .fold(0.0, |acc, (l, r)| acc + (r - l));
    (measure / set.len()).min(1.0)
}

/// Padded, merged misclassification intervals inside the analysis interval.
///
/// On `[lo, hi]` the padding follows `r~_i = r_i + eps`,
/// `l~_i = max(l_i - eps, r~_{i-1})`, clamped to the interval. For periodic
/// sets the padding wraps around the period before merging.
pub fn padded_intervals(set: &ZeroCrossingSet, epsilon: f64) -> Vec<(f64, f64)> {
    let (lo, hi) = set.interval;
    if set.roots.is_empty() {
        return Vec::new();
    }
    let eps = epsilon.max(0.0);
    if !set.periodic {
        let mut out = Vec::with_capacity(set.roots.len());
        let mut prev_r = lo;
        for &(l, r) in &set.roots {
            let rt = (r + eps).min(hi);
            let lt = (l - eps).max(prev_r).max(lo);
            if rt > lt {
                out.push((lt, rt));
            }
            prev_r = prev_r.max(rt);
        }
        return out;
    }

    let period = hi - lo;
    let mut pieces = Vec::with_capacity(set.roots.len() + 2);
    for &(l, r) in &set.roots {
        let (s, e) = (l - eps, r + eps);
        if e - s >= period {
            return vec![(lo, hi)];
        }
        if s < lo {
            pieces.push((s + period, hi));
            pieces.push((lo, e));
        } else if e > hi {
            pieces.push((s, hi));
            pieces.push((lo, e - period));
        } else {
            pieces.push((s, e));
        }
    }
    pieces.sort_by(|p, q| p.0.total_cmp(&q.0));
    let mut merged: Vec<(f64, f64)> = Vec::with_capacity(pieces.len());
    for (s, e) in pieces {
        match merged.last_mut() {
            Some(last) if s <= last.1 => last.1 = last.1.max(e),
            _ => merged.push((s, e)),
        }
    }
    merged
}
