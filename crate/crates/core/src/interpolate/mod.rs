//! Minimum weighted-norm interpolators: generic Gram solve, the closed form for
//! the regular grid, the kernel form for arbitrary points, and random features.

mod closed_form;
mod kernel;
mod minnorm;
mod rfs;

pub use closed_form::closed_form_coeffs;
pub use kernel::{bilevel_kernel, solve_bilevel_kernel, KernelInterpolant};
pub use minnorm::{
    min_norm_fourier, min_norm_legendre, solve_min_norm, solve_min_norm_with, spd_solve,
    DEFAULT_MAX_CONDITION,
};
pub use rfs::{solve_rfs, RfsSolution};

use serde::{Deserialize, Serialize};

use crate::featurelift::alias_indices;

/// Basis the coefficients refer to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Basis {
    Fourier,
    Legendre,
    Generic,
}

/// Spread above which alias coefficients are not summarised by a single `b`.
pub const ALIAS_SPREAD_TOL: f64 = 1e-9;

/// Learned coefficients on the unweighted basis, with the `(a, b)` summary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientVector {
    pub alpha: Vec<f64>,
    /// Coefficient of the constant feature.
    pub a: f64,
    /// Common alias coefficient, when the alias coefficients agree.
    pub b: Option<f64>,
    /// Set when alias coefficients were examined and disagree.
    pub alias_spread_flag: bool,
    pub basis: Basis,
}

impl CoefficientVector {
    pub fn new(alpha: Vec<f64>, basis: Basis) -> Self {
        let a = alpha.first().copied().unwrap_or(0.0);
        Self {
            alpha,
            a,
            b: None,
            alias_spread_flag: false,
            basis,
        }
    }

    /// Fills `b` with the mean alias coefficient for the regular grid of size
    /// `n`, or raises the spread flag when the aliases disagree.
    pub fn summarize_aliases(mut self, n: usize) -> Self {
        let idx = alias_indices(n, self.alpha.len());
        if idx.is_empty() || self.basis != Basis::Fourier {
            return self;
        }
        let vals: Vec<f64> = idx.iter().map(|&j| self.alpha[j]).collect();
        let mean = vals.iter().sum::<f64>() / vals.len() as f64;
        let (lo, hi) = vals
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &v| {
                (l.min(v), h.max(v))
            });
        if hi - lo > ALIAS_SPREAD_TOL {
            self.b = None;
            self.alias_spread_flag = true;
        } else {
            self.b = Some(mean);
            self.alias_spread_flag = false;
        }
        self
    }

    /// `<alpha, phi(x)>` for a basis vector `phi`.
    pub fn dot(&self, phi: &[f64]) -> f64 {
        self.alpha.iter().zip(phi).map(|(a, p)| a * p).sum()
    }
}
