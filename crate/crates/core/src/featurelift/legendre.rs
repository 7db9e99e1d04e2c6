use std::f64::consts::FRAC_1_SQRT_2;

use nalgebra::DMatrix;

use crate::error::{invalid, Result};

/// Largest Legendre feature count accepted.
pub const LEGENDRE_MAX_FEATURES: usize = 512;

/// First `b` Legendre polynomials scaled by `sqrt((2K + 1) / 2)`, i.e.
/// orthonormal for the Lebesgue measure on [-1, 1] (the same normalisation as
/// the Fourier map).
pub fn legendre_map(x: f64, b: usize) -> Result<Vec<f64>> {
    if b == 0 || b > LEGENDRE_MAX_FEATURES {
        return Err(invalid(format!(
            "Legendre feature count must be in 1..={LEGENDRE_MAX_FEATURES}, got {b}"
        )));
    }
    if !(x.abs() <= 1.0) {
        return Err(invalid(format!("Legendre map needs |x| <= 1, got {x}")));
    }
    let mut out = vec![0.0; b];
    legendre_map_into(x, &mut out);
    Ok(out)
}

/// Unchecked variant of [`legendre_map`] writing `out.len()` entries.
pub fn legendre_map_into(x: f64, out: &mut [f64]) {
    let mut prev = 0.0;
    let mut cur = 1.0;
    for (k, slot) in out.iter_mut().enumerate() {
        *slot = cur * ((2 * k + 1) as f64).sqrt() * FRAC_1_SQRT_2;
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0) * x * cur - kf * prev) / (kf + 1.0);
        prev = cur;
        cur = next;
    }
}

/// Design matrix with one row per point.
pub fn legendre_design_matrix(points: &[f64], b: usize) -> Result<DMatrix<f64>> {
    let mut m = DMatrix::zeros(points.len(), b);
    for (i, &x) in points.iter().enumerate() {
        let row = legendre_map(x, b)?;
        for (j, v) in row.into_iter().enumerate() {
            m[(i, j)] = v;
        }
    }
    Ok(m)
}
