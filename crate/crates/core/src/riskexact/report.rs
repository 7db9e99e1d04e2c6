use std::f64::consts::SQRT_2;

use serde::{Deserialize, Serialize};

use super::{
    adversarial_risk, classification_risk, crossing_lobes, exact_zero_crossings, k_star_bounds,
    risk_bounds, DirichletForm, LearnedFunction, DIP_CONSTANT,
};
use crate::error::Result;

/// Exact risks and theory quantities for one Dirichlet-form function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RiskReport {
    pub classification: f64,
    /// `(epsilon, adversarial risk)` pairs in the requested order.
    pub adversarial: Vec<(f64, f64)>,
    /// Index of the last crossing lobe (0 when the function stays positive).
    pub k_star: usize,
    /// Negative intervals per period.
    pub crossings_per_period: usize,
    pub k_star_upper: f64,
    pub k_star_positive_condition: bool,
    pub bound_classification: f64,
    pub bound_adv_small: f64,
    pub bound_adv_medium: u8,
    /// Phase-transition sample size for the given `q`, if `q > 1`.
    pub n0_q: Option<f64>,
}

impl RiskReport {
    pub fn adversarial_at(&self, epsilon: f64) -> Option<f64> {
        self.adversarial
            .iter()
            .find(|(e, _)| *e == epsilon)
            .map(|(_, r)| *r)
    }
}

/// Computes the exact report on one period of `form`.
pub fn exact_risk_report(
    form: &DirichletForm,
    epsilons: &[f64],
    q: Option<f64>,
) -> Result<RiskReport> {
    let f = LearnedFunction::Dirichlet(*form);
    let set = exact_zero_crossings(&f)?;
    let bcount = form.feature_count();
    let ks = k_star_bounds(form.a, form.b, bcount, form.n);
    let rb = risk_bounds(form.a, form.b, bcount, form.n);
    Ok(RiskReport {
        classification: classification_risk(&set),
        adversarial: epsilons
            .iter()
            .map(|&e| (e, adversarial_risk(&set, e)))
            .collect(),
        k_star: crossing_lobes(&set, form).last().copied().unwrap_or(0),
        crossings_per_period: set.roots.len(),
        k_star_upper: ks.upper,
        k_star_positive_condition: ks.positive_condition,
        bound_classification: rb.classification,
        bound_adv_small: rb.adv_small,
        bound_adv_medium: rb.adv_medium,
        n0_q: q
            .filter(|&q| q > 1.0)
            .map(|q| ((2.0 + SQRT_2) / (DIP_CONSTANT * 2.0 * SQRT_2)).powf(1.0 / (q - 1.0))),
    })
}
