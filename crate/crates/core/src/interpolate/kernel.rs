use std::f64::consts::{FRAC_1_SQRT_2, PI};

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::{spd_solve, Basis, CoefficientVector, DEFAULT_MAX_CONDITION};
use crate::error::{invalid, Result};
use crate::featurelift::{BilevelEnsemble, TrainingSet};
use crate::riskexact::dirichlet_kernel;

/// Bilevel Fourier kernel `K(u) = lambda1/2 + (lambda_l/2) (D_M(pi u) - 1)`,
/// the weighted inner product of Fourier maps at points `u` apart.
pub fn bilevel_kernel(u: f64, lambda1: f64, lambda_l: f64, max_freq: usize) -> f64 {
    lambda1 / 2.0 + lambda_l / 2.0 * (dirichlet_kernel(PI * u, max_freq as f64) - 1.0)
}

/// Minimum-norm bilevel Fourier interpolator in kernel form
/// `f(x) = sum_i g_i K(x - x_i)`, valid for any training layout.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelInterpolant {
    pub feature_count: usize,
    pub lambda1: f64,
    pub lambda_l: f64,
    pub points: Vec<f64>,
    pub dual: Vec<f64>,
}

/// Solves the kernel system `G g = y` with `G_ij = K(x_i - x_j)`.
pub fn solve_bilevel_kernel(
    ensemble: &BilevelEnsemble,
    train: &TrainingSet,
) -> Result<KernelInterpolant> {
    let b = ensemble.feature_count;
    if b.is_multiple_of(2) {
        return Err(invalid(format!(
            "Fourier feature count must be odd, got {b}"
        )));
    }
    let m = (b - 1) / 2;
    let n = train.len();
    let gram = DMatrix::from_fn(n, n, |i, j| {
        bilevel_kernel(
            train.points[i] - train.points[j],
            ensemble.lambda1,
            ensemble.lambda_l,
            m,
        )
    });
    let y = DVector::from_column_slice(&train.labels);
    let dual = spd_solve(gram, &y, DEFAULT_MAX_CONDITION)?;
    Ok(KernelInterpolant {
        feature_count: b,
        lambda1: ensemble.lambda1,
        lambda_l: ensemble.lambda_l,
        points: train.points.clone(),
        dual: dual.iter().copied().collect(),
    })
}

impl KernelInterpolant {
    pub fn max_freq(&self) -> usize {
        (self.feature_count - 1) / 2
    }

    pub fn eval(&self, x: f64) -> f64 {
        let m = self.max_freq();
        self.points
            .iter()
            .zip(&self.dual)
            .map(|(&xi, &g)| g * bilevel_kernel(x - xi, self.lambda1, self.lambda_l, m))
            .sum()
    }

    /// Fourier-basis coefficients of the interpolant.
    pub fn coefficients(&self) -> CoefficientVector {
        let m = self.max_freq();
        let mut alpha = vec![0.0; self.feature_count];
        alpha[0] = self.lambda1 * FRAC_1_SQRT_2 * self.dual.iter().sum::<f64>();
        for (&xi, &g) in self.points.iter().zip(&self.dual) {
            for k in 1..=m {
                let (s, c) = (k as f64 * PI * xi).sin_cos();
                alpha[2 * k - 1] += self.lambda_l * g * s;
                alpha[2 * k] += self.lambda_l * g * c;
            }
        }
        CoefficientVector::new(alpha, Basis::Fourier)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::featurelift::{build_ensemble, fourier_map, make_training_set, LayoutKind};
    use crate::interpolate::min_norm_fourier;

    #[test]
    fn agrees_with_generic_solver() {
        let e = build_ensemble(10, 2.0, 1.45).unwrap();
        let t = make_training_set(10, LayoutKind::Random, Some(5)).unwrap();
        let k = solve_bilevel_kernel(&e, &t).unwrap();
        let g = min_norm_fourier(&e, &t).unwrap();
        let c = k.coefficients();
        for (x, y) in g.alpha.iter().zip(&c.alpha) {
            assert!((x - y).abs() < 1e-8, "{x} vs {y}");
        }
        for i in 0..50 {
            let x = -1.0 + 2.0 * i as f64 / 49.0;
            let phi = fourier_map(x, e.feature_count).unwrap();
            assert!((k.eval(x) - g.dot(&phi)).abs() < 1e-8);
        }
        for &x in &t.points {
            assert!((k.eval(x) - 1.0).abs() < 1e-8);
        }
    }
}
