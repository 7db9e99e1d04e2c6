use std::f64::consts::{PI, SQRT_2};

use serde::{Deserialize, Serialize};

use super::dirichlet_lobe_minimum;
use crate::error::{Error, Result};
use crate::featurelift::BilevelEnsemble;

/// Magnitude of the normalised sinc minimum, `-min sin(u)/u`, used by the
/// lower-bound condition on the number of crossing lobes.
pub const DIP_CONSTANT: f64 = 0.2172;

/// Hand estimate `0.21 / 1.21` of the critical signal floor.
pub const HAND_SURVIVAL_THRESHOLD: f64 = 0.21 / 1.21;

/// Bounds on the number of crossing lobes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KStarBounds {
    /// Upper bound on the crossing-lobe index; `+inf` when vacuous.
    pub upper: f64,
    /// Sufficient condition for at least one crossing lobe.
    pub positive_condition: bool,
    /// Set when `2a - sqrt2 b <= 0`.
    pub vacuous: bool,
}

fn signal_gap(a: f64, b: f64) -> f64 {
    2.0 * a - SQRT_2 * b
}

/// Upper bound on k* and the condition guaranteeing `k* >= 1`.
pub fn k_star_bounds(a: f64, b: f64, feature_count: f64, n: usize) -> KStarBounds {
    let nf = n as f64;
    let gap = signal_gap(a, b);
    let spread = feature_count - 1.0 + nf;
    let positive_condition = DIP_CONSTANT * SQRT_2 * b * spread > nf * gap;
    if !(gap > 0.0) {
        return KStarBounds {
            upper: f64::INFINITY,
            positive_condition,
            vacuous: true,
        };
    }
    let upper = (2.0 * SQRT_2 * b * spread + nf * gap) / (2.0 * PI * nf * gap);
    KStarBounds {
        upper,
        positive_condition,
        vacuous: false,
    }
}

/// Risk bounds for the Dirichlet-form interpolator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RiskBounds {
    pub classification: f64,
    /// Bound on the adversarial risk at `epsilon = 2 pi / h`.
    pub adv_small: f64,
    /// Predicted adversarial risk at `epsilon = 2 / n` (0 or 1).
    pub adv_medium: u8,
    pub vacuous: bool,
}

/// Classification and adversarial bounds with `h = (B - 1 + n) / 2`.
pub fn risk_bounds(a: f64, b: f64, feature_count: f64, n: usize) -> RiskBounds {
    let nf = n as f64;
    let h = (feature_count - 1.0 + nf) / 2.0;
    let ks = k_star_bounds(a, b, feature_count, n);
    let adv_medium = u8::from(ks.positive_condition);
    if ks.vacuous {
        return RiskBounds {
            classification: 0.5,
            adv_small: 0.5,
            adv_medium,
            vacuous: true,
        };
    }
    let bound = SQRT_2 * b / (PI * signal_gap(a, b)) + nf / (2.0 * h);
    RiskBounds {
        classification: bound,
        adv_small: bound,
        adv_medium,
        vacuous: false,
    }
}

/// Row of the table of regimes: limiting risks as `n` grows.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegimeRow {
    pub regression: f64,
    /// Classification with lifted Fourier features.
    pub classification_lifted: f64,
    /// Classification with independent features.
    pub classification_independent: f64,
    /// Adversarial risk at `epsilon = 1/n` with lifted features.
    pub adversarial: f64,
}

/// Asymptotic regime of a bilevel ensemble. Boundary values of `q` belong to
/// the lower regime.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// `q <= 1`: every risk vanishes.
    AllZero,
    /// `1 < q <= (p + 1) / 2`: classification generalises, regression and
    /// adversarial robustness fail.
    RegressionFails,
    /// `(p + 1) / 2 < q <= p`: only lifted features still classify.
    IndependentHalf,
    /// `q > p`: classification is a coin flip.
    Collapse,
}

impl Regime {
    pub fn classify(p: f64, q: f64) -> Self {
        if q <= 1.0 {
            Regime::AllZero
        } else if q <= 1.0 + (p - 1.0) / 2.0 {
            Regime::RegressionFails
        } else if q <= p {
            Regime::IndependentHalf
        } else {
            Regime::Collapse
        }
    }

    pub fn row(&self) -> RegimeRow {
        let (regression, classification_lifted, classification_independent, adversarial) =
            match self {
                Regime::AllZero => (0.0, 0.0, 0.0, 0.0),
                Regime::RegressionFails => (1.0, 0.0, 0.0, 1.0),
                Regime::IndependentHalf => (1.0, 0.0, 0.5, 1.0),
                Regime::Collapse => (1.0, 0.5, 0.5, 1.0),
            };
        RegimeRow {
            regression,
            classification_lifted,
            classification_independent,
            adversarial,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Regime::AllZero => "all_zero",
            Regime::RegressionFails => "regression_fails",
            Regime::IndependentHalf => "independent_half",
            Regime::Collapse => "collapse",
        }
    }
}

/// Predictions for a bilevel ensemble on the regular grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BilevelPrediction {
    /// `min(1/2, C n^(q - p))`.
    pub risk_bound: f64,
    /// The constant `C`, read off the classification bound at this ensemble.
    pub risk_constant: f64,
    /// Sample size beyond which adversarial examples at `2/n` are guaranteed.
    pub n0: Option<f64>,
    pub regime: Regime,
}

/// Evaluates the classification bound at the ensemble's exact `(a, b)` and expresses
/// it as `C n^(q - p)`; adds the phase-transition size and the regime.
pub fn bilevel_predictions(ensemble: &BilevelEnsemble) -> BilevelPrediction {
    let (a, b) = exact_pair(ensemble);
    let nf = ensemble.n as f64;
    let bound = risk_bounds(a, b, ensemble.feature_count as f64, ensemble.n).classification;
    let scale = nf.powf(ensemble.q - ensemble.p);
    let n0 = (ensemble.q > 1.0)
        .then(|| ((2.0 + SQRT_2) / (DIP_CONSTANT * 2.0 * SQRT_2)).powf(1.0 / (ensemble.q - 1.0)));
    BilevelPrediction {
        risk_bound: bound.min(0.5),
        risk_constant: bound / scale,
        n0,
        regime: Regime::classify(ensemble.p, ensemble.q),
    }
}

/// `(a, b)` of the grid interpolator, with the alias ratio taken as a real
/// number when the divisibility condition fails.
fn exact_pair(ensemble: &BilevelEnsemble) -> (f64, f64) {
    let denom = ensemble.lambda1 / 2.0 + ensemble.alias_ratio() * ensemble.lambda_l;
    (ensemble.lambda1 / SQRT_2 / denom, ensemble.lambda_l / denom)
}

/// Critical survival point of the constant-feature coefficient.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalSurvival {
    /// Constant-feature coefficient at which the deepest dip touches zero.
    pub a_c: f64,
    /// Matching alias coefficient from `a/sqrt2 + N_A b = 1`.
    pub b_c: f64,
    /// Matching signal floor `s = a/sqrt2 - b/2`.
    pub s_c: f64,
    /// Normalised dip `-min D_{N_A} / (2 N_A + 1)` over the first negative lobe.
    pub dip_constant: f64,
    pub alias_count: usize,
}

/// Solves `s + (b/2) min D_{N_A} = 0` under the interpolation constraint
/// `a/sqrt2 + N_A b = 1`. Below `a_c` the learned function crosses zero.
pub fn critical_survival(n: usize, feature_count: usize) -> Result<CriticalSurvival> {
    if n < 1 || feature_count < 2 * n + 1 || !(feature_count - 1).is_multiple_of(2 * n) {
        return Err(Error::AliasStructureViolated(format!(
            "B - 1 = {} is not a positive multiple of 2n = {}",
            feature_count.saturating_sub(1),
            2 * n
        )));
    }
    let n_a = (feature_count - 1) / (2 * n);
    let order = n_a as f64;
    let (_, min_d) = dirichlet_lobe_minimum(order);
    let dip = -min_d / (2.0 * order + 1.0);
    Ok(critical_survival_with_dip(n_a, dip))
}

pub(crate) fn critical_survival_with_dip(n_a: usize, dip: f64) -> CriticalSurvival {
    let order = n_a as f64;
    // With u = a/sqrt2 and b = (1 - u)/N_A the zero condition reads u = K b.
    let k = 0.5 + dip * (order + 0.5);
    let u = k / (order + k);
    let b_c = (1.0 - u) / order;
    CriticalSurvival {
        a_c: SQRT_2 * u,
        b_c,
        s_c: u - b_c / 2.0,
        dip_constant: dip,
        alias_count: n_a,
    }
}

/// Quadratic model of the `k`-th negative lobe on the positive side.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadraticLobe {
    pub k: usize,
    /// Lobe midpoint `(2k - 1/2) / h`.
    pub center: f64,
    /// Depth of `(b/2) D` at the midpoint, positive for a negative lobe.
    pub depth: f64,
    /// Width of the misclassified region, `None` when the quadratic stays
    /// above zero (imaginary roots).
    pub width: Option<f64>,
    /// Gap to the previous lobe's misclassified region (or to the training
    /// point for `k = 1`).
    pub gap: f64,
}

/// Quadratic with the same roots `(2k - 1)/h`, `2k/h` as lobe `k` and depth
/// matched at the lobe midpoint, shifted by the signal floor.
pub fn quadratic_lobe(
    k: usize,
    a: f64,
    b: f64,
    feature_count: f64,
    n: usize,
) -> Result<QuadraticLobe> {
    if k == 0 {
        return Err(crate::error::invalid("lobe index starts at 1"));
    }
    let model = |k: usize| -> (f64, f64, Option<f64>) {
        let nf = n as f64;
        let h = (feature_count - 1.0 + nf) / 2.0;
        let lobe = 1.0 / h;
        let center = (2.0 * k as f64 - 0.5) / h;
        let depth = b / 2.0 / (nf * PI * center / 2.0).sin();
        let floor = (2.0 * a - SQRT_2 * b) / (2.0 * SQRT_2);
        let width = (depth > floor).then(|| lobe * (1.0 - floor / depth).sqrt());
        (center, depth, width)
    };
    let (center, depth, width) = model(k);
    let prev_edge = if k == 1 {
        0.0
    } else {
        let (c, _, w) = model(k - 1);
        c + w.unwrap_or(0.0) / 2.0
    };
    let gap = center - width.unwrap_or(0.0) / 2.0 - prev_edge;
    Ok(QuadraticLobe {
        k,
        center,
        depth,
        width,
        gap,
    })
}
