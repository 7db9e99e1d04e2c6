use std::f64::consts::{FRAC_1_SQRT_2, PI};

use nalgebra::DMatrix;

use crate::error::{invalid, Result};

/// Fourier feature map `[1/sqrt2, sin(pi x), cos(pi x), ..., sin(M pi x), cos(M pi x)]`
/// with `M = (B - 1) / 2`.
pub fn fourier_map(x: f64, b: usize) -> Result<Vec<f64>> {
    check_odd(b)?;
    let mut out = vec![0.0; b];
    fourier_map_into(x, &mut out);
    Ok(out)
}

/// Writes the Fourier map of length `out.len()` (assumed odd) into `out`.
pub fn fourier_map_into(x: f64, out: &mut [f64]) {
    out[0] = FRAC_1_SQRT_2;
    let m_max = (out.len() - 1) / 2;
    for m in 1..=m_max {
        let (s, c) = (m as f64 * PI * x).sin_cos();
        out[2 * m - 1] = s;
        out[2 * m] = c;
    }
}

/// Design matrix with one row per point.
pub fn design_matrix(points: &[f64], b: usize) -> Result<DMatrix<f64>> {
    check_odd(b)?;
    let mut m = DMatrix::zeros(points.len(), b);
    let mut row = vec![0.0; b];
    for (i, &x) in points.iter().enumerate() {
        fourier_map_into(x, &mut row);
        for (j, v) in row.iter().enumerate() {
            m[(i, j)] = *v;
        }
    }
    Ok(m)
}

/// Indices of the alias columns `cos(k n pi x)`, `k = 1..N_A`, which equal 1 on
/// the regular grid of even size `n`.
pub fn alias_indices(n: usize, b: usize) -> Vec<usize> {
    let m_max = b.saturating_sub(1) / 2;
    (1..)
        .map(|k| k * n)
        .take_while(|&m| m <= m_max)
        .map(|m| 2 * m)
        .collect()
}

fn check_odd(b: usize) -> Result<()> {
    if b == 0 || b.is_multiple_of(2) {
        return Err(invalid(format!(
            "Fourier feature count must be odd, got {b}"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::featurelift::{make_training_set, LayoutKind};

    #[test]
    fn small_examples() {
        let v = fourier_map(0.0, 5).unwrap();
        let want = [FRAC_1_SQRT_2, 0.0, 1.0, 0.0, 1.0];
        for (a, b) in v.iter().zip(want) {
            assert!((a - b).abs() < 1e-15);
        }
        let v = fourier_map(1.0, 5).unwrap();
        let want = [FRAC_1_SQRT_2, 0.0, -1.0, 0.0, 1.0];
        for (a, b) in v.iter().zip(want) {
            assert!((a - b).abs() < 1e-15);
        }
        assert!(fourier_map(0.3, 4).is_err());
    }

    #[test]
    fn aliases_are_ones_on_the_grid() {
        for n in [4usize, 8, 16] {
            let b = 8 * n + 1;
            let ts = make_training_set(n, LayoutKind::Grid, None).unwrap();
            let m = design_matrix(&ts.points, b).unwrap();
            let aliases = alias_indices(n, b);
            assert_eq!(aliases.len(), 4);
            for &j in &aliases {
                for i in 0..n {
                    assert!((m[(i, j)] - 1.0).abs() < 1e-9);
                }
            }
            for i in 0..n {
                assert!((m[(i, 0)] * 2f64.sqrt() - 1.0).abs() < 1e-15);
            }
            for j in 1..b {
                if aliases.contains(&j) {
                    continue;
                }
                let s: f64 = (0..n).map(|i| m[(i, j)]).sum();
                assert!(s.abs() < 1e-9, "column {j} sums to {s} for n={n}");
            }
        }
    }
}
