use std::f64::consts::{PI, SQRT_2, TAU};

use serde::{Deserialize, Serialize};

use super::golden_min;
use crate::error::{invalid, Error, Result};
use crate::featurelift::BilevelEnsemble;
use crate::interpolate::CoefficientVector;

/// Below this `|sin(theta/2)|` the kernel is replaced by its limit `2N + 1`.
const SINGULAR_TOL: f64 = 1e-12;

/// Dirichlet kernel `D_N(theta) = sin((N + 1/2) theta) / sin(theta / 2)`.
///
/// For integer `N` the argument is reduced to one period. For non-integer `N`
/// the kernel is only meaningful for `|theta| < 2 pi`.
pub fn dirichlet_kernel(theta: f64, order: f64) -> f64 {
    let t = if order.fract() == 0.0 {
        theta - TAU * (theta / TAU).round()
    } else {
        theta
    };
    let s = (t / 2.0).sin();
    if s.abs() < SINGULAR_TOL {
        2.0 * order + 1.0
    } else {
        ((order + 0.5) * t).sin() / s
    }
}

/// Envelope `2b / (n pi x)` dominating `(b/2) |D_{N_A}(n pi x)|` on `(0, 1/n]`.
pub fn dirichlet_envelope(x: f64, n: usize, b: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(invalid(format!("envelope needs x > 0, got {x}")));
    }
    Ok(2.0 * b / (n as f64 * PI * x))
}

/// Minimum of `D_N` over its first negative lobe
/// `theta in (2 pi / (2N + 1), 4 pi / (2N + 1))`. Returns `(theta, value)`.
pub fn dirichlet_lobe_minimum(order: f64) -> (f64, f64) {
    let w = TAU / (2.0 * order + 1.0);
    golden_min(|t| dirichlet_kernel(t, order), w, 2.0 * w, 200)
}

/// Learned function on the regular grid in Dirichlet form
/// `f(x) = (2a - sqrt2 b) / (2 sqrt2) + (b/2) D_{N_A}(n pi x)`, extended
/// periodically with period `2/n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DirichletForm {
    pub a: f64,
    pub b: f64,
    pub n: usize,
    /// `N_A = (B - 1) / (2n)`, possibly non-integer for overridden `B`.
    pub alias_ratio: f64,
}

impl DirichletForm {
    pub fn new(a: f64, b: f64, n: usize, feature_count: usize) -> Result<Self> {
        if n < 1 || feature_count <= 1 {
            return Err(invalid("Dirichlet form needs n >= 1 and B > 1"));
        }
        Ok(Self {
            a,
            b,
            n,
            alias_ratio: (feature_count as f64 - 1.0) / (2.0 * n as f64),
        })
    }

    /// Dirichlet form of the closed-form interpolator of `ensemble`.
    pub fn from_ensemble(ensemble: &BilevelEnsemble) -> Result<Self> {
        let cv = crate::interpolate::closed_form_coeffs(ensemble)?;
        Self::from_coefficients(&cv, ensemble)
    }

    /// Dirichlet form of a coefficient vector with a common alias coefficient.
    pub fn from_coefficients(cv: &CoefficientVector, ensemble: &BilevelEnsemble) -> Result<Self> {
        let b = cv.b.ok_or_else(|| {
            Error::AliasStructureViolated("coefficients carry no common alias value".into())
        })?;
        Self::new(cv.a, b, ensemble.n, ensemble.feature_count)
    }

    /// Constant part `s = (2a - sqrt2 b) / (2 sqrt2)`.
    pub fn signal_floor(&self) -> f64 {
        (2.0 * self.a - SQRT_2 * self.b) / (2.0 * SQRT_2)
    }

    /// `h = n (N_A + 1/2) = (B - 1 + n) / 2`.
    pub fn half_order(&self) -> f64 {
        self.n as f64 * (self.alias_ratio + 0.5)
    }

    pub fn feature_count(&self) -> f64 {
        2.0 * self.n as f64 * self.alias_ratio + 1.0
    }

    pub fn period(&self) -> f64 {
        2.0 / self.n as f64
    }

    pub fn eval(&self, x: f64) -> f64 {
        let t = x * self.n as f64 / 2.0;
        let theta = TAU * (t - t.round());
        self.signal_floor() + self.b / 2.0 * dirichlet_kernel(theta, self.alias_ratio)
    }
}
