use std::f64::consts::{FRAC_1_SQRT_2, PI};

use serde::{Deserialize, Serialize};

use super::DirichletForm;
use crate::featurelift::legendre_map_into;
use crate::interpolate::{KernelInterpolant, RfsSolution};

/// Terms between exact re-synchronisations of the phasor recurrence.
const PHASOR_RESYNC: usize = 64;

/// A learned function together with its evaluation strategy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum LearnedFunction {
    /// Closed-form Dirichlet representation on the regular grid.
    Dirichlet(DirichletForm),
    /// Direct sum over Fourier coefficients.
    Fourier { alpha: Vec<f64> },
    /// Direct sum over orthonormal Legendre coefficients.
    Legendre { alpha: Vec<f64> },
    /// Kernel form of the bilevel Fourier interpolator.
    Kernel(KernelInterpolant),
    /// Random-feature solution, evaluated through its effective coefficients.
    Rfs(RfsSolution),
    /// Equal to -1 on the listed intervals and +1 elsewhere.
    Indicator { negative: Vec<(f64, f64)> },
}

impl LearnedFunction {
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            LearnedFunction::Dirichlet(form) => form.eval(x),
            LearnedFunction::Fourier { alpha } => fourier_sum(alpha, x),
            LearnedFunction::Legendre { alpha } => {
                let mut phi = vec![0.0; alpha.len()];
                legendre_map_into(x.clamp(-1.0, 1.0), &mut phi);
                phi.iter().zip(alpha).map(|(p, a)| p * a).sum()
            }
            LearnedFunction::Kernel(k) => k.eval(x),
            LearnedFunction::Rfs(s) => fourier_sum(&s.alpha_eff, x),
            LearnedFunction::Indicator { negative } => {
                if negative.iter().any(|&(l, r)| l < x && x < r) {
                    -1.0
                } else {
                    1.0
                }
            }
        }
    }

    /// Period of the function when it is analysed on a single period.
    pub fn period(&self) -> Option<f64> {
        match self {
            LearnedFunction::Dirichlet(form) => Some(form.period()),
            _ => None,
        }
    }

    /// Sign changes per unit length that a scan must resolve; one lobe spans
    /// `2 / scale`.
    pub fn oscillation_scale(&self) -> f64 {
        match self {
            LearnedFunction::Dirichlet(form) => 2.0 * form.half_order(),
            LearnedFunction::Fourier { alpha } => 1.25 * alpha.len() as f64,
            LearnedFunction::Legendre { alpha } => 2.0 * alpha.len() as f64,
            LearnedFunction::Kernel(k) => (k.feature_count + k.points.len()) as f64,
            LearnedFunction::Rfs(s) => 1.25 * s.feature_count() as f64,
            LearnedFunction::Indicator { negative } => {
                let narrowest = negative
                    .iter()
                    .map(|&(l, r)| r - l)
                    .fold(f64::INFINITY, f64::min);
                if narrowest.is_finite() {
                    (4.0 / narrowest).max(16.0)
                } else {
                    16.0
                }
            }
        }
    }

    /// Interval the exact analysis runs on and whether it wraps around.
    pub fn analysis_interval(&self) -> ((f64, f64), bool) {
        match self.period() {
            Some(p) => ((-p / 2.0, p / 2.0), true),
            None => ((-1.0, 1.0), false),
        }
    }

    /// Default scan size: eight points per lobe width over `len`.
    pub fn default_scan_points(&self, len: f64) -> usize {
        ((8.0 * self.oscillation_scale() * len).ceil() as usize + 1).max(1025)
    }
}

/// `sum_j alpha_j phi_j(x)` for the Fourier map, using a phasor recurrence
/// with periodic exact re-synchronisation.
fn fourier_sum(alpha: &[f64], x: f64) -> f64 {
    let m_max = (alpha.len() - 1) / 2;
    let mut acc = alpha[0] * FRAC_1_SQRT_2;
    let (s1, c1) = (PI * x).sin_cos();
    let (mut s, mut c) = (0.0, 1.0);
    for m in 1..=m_max {
        if m % PHASOR_RESYNC == 0 {
            let (ss, cc) = (m as f64 * PI * x).sin_cos();
            s = ss;
            c = cc;
        } else {
            let ns = s * c1 + c * s1;
            let nc = c * c1 - s * s1;
            s = ns;
            c = nc;
        }
        acc += alpha[2 * m - 1] * s + alpha[2 * m] * c;
    }
    acc
}
