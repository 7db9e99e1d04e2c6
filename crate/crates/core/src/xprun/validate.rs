use std::f64::consts::PI;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::sweep::{DEFAULT_N_GRID, DEFAULT_Q_GRID};
use crate::error::Result;
use crate::featurelift::{build_ensemble, make_training_set, BilevelEnsemble, LayoutKind};
use crate::interpolate::{closed_form_coeffs, min_norm_fourier};
use crate::mcestim::{mc_adversarial_risk, mc_classification_risk, McConfig};
use crate::riskexact::{
    adversarial_risk, classification_risk, critical_survival, crossing_lobes, dirichlet_envelope,
    dirichlet_lobe_minimum, exact_risk_report, exact_zero_crossings, padded_intervals,
    quadratic_lobe, DirichletForm, LearnedFunction,
};

/// Outcome of one named check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

/// Outcome of [`validate`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub checks: Vec<CheckResult>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> Vec<&CheckResult> {
        self.checks.iter().filter(|c| !c.passed).collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::json!({
            "passed": self.passed(),
            "failures": self.failures().iter().map(|c| &c.name).collect::<Vec<_>>(),
            "checks": self.checks,
        })
        .to_string()
    }
}

type CheckFn = fn() -> Result<(bool, String)>;

/// Names of the checks run by [`validate`], in order.
pub const CHECKS: [(&str, CheckFn); 12] = [
    ("closed_form_equivalence", check_closed_form_equivalence),
    ("dirichlet_vs_direct_sum", check_dirichlet_vs_direct),
    ("envelope_bound", check_envelope),
    ("dirichlet_min_constant", check_dirichlet_min_constant),
    ("golden_case", check_golden_case),
    ("phase_transition", check_phase_transition),
    ("bound_soundness_classification", check_bound_classification),
    ("bound_soundness_adversarial", check_bound_adversarial),
    ("mc_vs_exact", check_mc_vs_exact),
    ("quadratic_lobe", check_quadratic_lobe),
    ("padding_monotonicity", check_padding_monotonicity),
    ("critical_survival_bracketing", check_critical_survival),
];

/// Runs every cross-check; errors inside a check count as a failure.
pub fn validate() -> ValidationReport {
    validate_only(&[])
}

/// Runs the checks whose names are listed, or all of them when empty.
pub fn validate_only(names: &[&str]) -> ValidationReport {
    let checks = CHECKS
        .iter()
        .filter(|(name, _)| names.is_empty() || names.contains(name))
        .map(|(name, check)| run_check(name, *check))
        .collect();
    ValidationReport { checks }
}

fn run_check(name: &str, check: CheckFn) -> CheckResult {
    let start = Instant::now();
    let (passed, detail) = match check() {
        Ok(r) => r,
        Err(e) => (false, format!("error: {e}")),
    };
    CheckResult {
        name: name.to_string(),
        passed,
        detail,
        seconds: start.elapsed().as_secs_f64(),
    }
}

fn exact_form(e: &BilevelEnsemble) -> Result<DirichletForm> {
    DirichletForm::from_ensemble(e)
}

fn check_closed_form_equivalence() -> Result<(bool, String)> {
    let mut worst: f64 = 0.0;
    for n in [8, 16, 32] {
        for q in [0.5, 1.45, 2.0] {
            let e = build_ensemble(n, 2.0, q)?;
            let train = make_training_set(n, LayoutKind::Grid, None)?;
            let general = min_norm_fourier(&e, &train)?;
            let closed = closed_form_coeffs(&e)?;
            for (g, c) in general.alpha.iter().zip(&closed.alpha) {
                worst = worst.max((g - c).abs());
            }
        }
    }
    Ok((
        worst <= 1e-8,
        format!("max entrywise difference {worst:.3e}"),
    ))
}

fn check_dirichlet_vs_direct() -> Result<(bool, String)> {
    let e = build_ensemble(8, 2.0, 1.45)?;
    let form = LearnedFunction::Dirichlet(exact_form(&e)?);
    let direct = LearnedFunction::Fourier {
        alpha: closed_form_coeffs(&e)?.alpha,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let worst = (0..1000)
        .map(|_| rng.random_range(-1.0..=1.0))
        .map(|x: f64| (form.eval(x) - direct.eval(x)).abs())
        .fold(0.0, f64::max);
    Ok((
        worst <= 1e-8,
        format!("max difference over 1000 points {worst:.3e}"),
    ))
}

fn check_envelope() -> Result<(bool, String)> {
    let mut violations = 0usize;
    let mut ensembles = 0usize;
    for n in [8, 16, 30, 64, 128] {
        for q in [1.45, 2.0] {
            let form = exact_form(&build_ensemble(n, 2.0, q)?)?;
            ensembles += 1;
            let top = 1.0 / n as f64;
            for i in 1..=10_000 {
                let x = top * i as f64 / 10_000.0;
                let value = (form.eval(x) - form.signal_floor()).abs();
                if value > dirichlet_envelope(x, n, form.b)? * (1.0 + 1e-12) {
                    violations += 1;
                }
            }
        }
    }
    Ok((
        violations == 0,
        format!("{violations} violations over {ensembles} ensembles"),
    ))
}

fn check_dirichlet_min_constant() -> Result<(bool, String)> {
    let mut ok = true;
    let mut detail = Vec::new();
    for n_a in [50.0, 200.0] {
        let (_, min) = dirichlet_lobe_minimum(n_a);
        let ratio = -min / (n_a + 0.5);
        ok &= (ratio - 0.4344).abs() <= 0.01 * 0.4344;
        detail.push(format!("N_A={n_a}: -min/(N_A+1/2)={ratio:.5}"));
    }
    Ok((ok, detail.join("; ")))
}

fn check_golden_case() -> Result<(bool, String)> {
    let form = DirichletForm::new(0.13, 0.0055, 30, 4930)?;
    let report = exact_risk_report(&form, &[], None)?;
    let ok = report.crossings_per_period == 2
        && (report.k_star as f64) <= report.k_star_upper.ceil()
        && report.k_star_positive_condition;
    Ok((
        ok,
        format!(
            "crossings per period {}, last crossing lobe {}, upper bound {:.3}, lower-bound condition {}",
            report.crossings_per_period, report.k_star, report.k_star_upper, report.k_star_positive_condition
        ),
    ))
}

fn check_phase_transition() -> Result<(bool, String)> {
    let mut ok = true;
    let mut detail = Vec::new();
    for (q, n, want) in [
        (1.45, 64, 1.0),
        (2.0, 8, 1.0),
        (0.5, 64, 0.0),
        (0.9, 128, 0.0),
    ] {
        let form = exact_form(&build_ensemble(n, 2.0, q)?)?;
        let eps = 2.0 / n as f64;
        let got = exact_risk_report(&form, &[eps], Some(q))?.adversarial[0].1;
        ok &= got == want;
        detail.push(format!("(q={q}, n={n}) adv={got}"));
    }
    let e = build_ensemble(8, 2.0, 2.0)?;
    let n0 = exact_risk_report(&exact_form(&e)?, &[], Some(2.0))?
        .n0_q
        .unwrap_or(f64::NAN);
    ok &= (n0 - 5.55).abs() <= 1e-2;
    detail.push(format!("n0(2)={n0:.4}"));
    Ok((ok, detail.join("; ")))
}

/// Exact risks and bounds of one grid cell.
struct BoundCell {
    n: usize,
    q: f64,
    classification: f64,
    bound_classification: f64,
    adv_small: f64,
    bound_adv_small: f64,
}

/// Exact risks and bounds over the default `(n, q)` grid at `p = 2`.
fn bound_grid() -> Result<Vec<BoundCell>> {
    let mut rows = Vec::new();
    for &n in &DEFAULT_N_GRID {
        for &q in &DEFAULT_Q_GRID {
            let form = exact_form(&build_ensemble(n, 2.0, q)?)?;
            let eps = 2.0 * PI / form.half_order();
            let r = exact_risk_report(&form, &[eps], Some(q))?;
            rows.push(BoundCell {
                n,
                q,
                classification: r.classification,
                bound_classification: r.bound_classification,
                adv_small: r.adversarial[0].1,
                bound_adv_small: r.bound_adv_small,
            });
        }
    }
    Ok(rows)
}

fn check_bound_classification() -> Result<(bool, String)> {
    let rows = bound_grid()?;
    let bad: Vec<String> = rows
        .iter()
        .filter(|r| r.classification > r.bound_classification)
        .map(|r| {
            format!(
                "(n={}, q={}) {:.4} > {:.4}",
                r.n, r.q, r.classification, r.bound_classification
            )
        })
        .collect();
    Ok((bad.is_empty(), summarize(rows.len(), &bad)))
}

fn check_bound_adversarial() -> Result<(bool, String)> {
    let rows = bound_grid()?;
    let bad: Vec<String> = rows
        .iter()
        .filter(|r| r.adv_small > r.bound_adv_small)
        .map(|r| {
            format!(
                "(n={}, q={}) {:.4} > {:.4}",
                r.n, r.q, r.adv_small, r.bound_adv_small
            )
        })
        .collect();
    Ok((bad.is_empty(), summarize(rows.len(), &bad)))
}

fn summarize(total: usize, bad: &[String]) -> String {
    if bad.is_empty() {
        format!("{total}/{total} cells within bound")
    } else {
        format!(
            "{}/{total} cells within bound; violations: {}",
            total - bad.len(),
            bad.join(", ")
        )
    }
}

fn check_mc_vs_exact() -> Result<(bool, String)> {
    let mut ok = true;
    let mut detail = Vec::new();
    let n_test = 20_000;
    for (n, q) in [(16, 1.45), (8, 2.0), (30, 1.25)] {
        let form = exact_form(&build_ensemble(n, 2.0, q)?)?;
        let f = LearnedFunction::Dirichlet(form);
        let set = exact_zero_crossings(&f)?;
        let cfg = McConfig::new(n_test, 11);
        let tol = |p: f64| 4.0 * (p * (1.0 - p) / n_test as f64).sqrt() + 1.0 / n_test as f64;
        let exact = classification_risk(&set);
        let mc = mc_classification_risk(&f, &cfg)?.estimate;
        ok &= (mc - exact).abs() <= tol(exact);
        detail.push(format!("(n={n}, q={q}) C exact {exact:.5} mc {mc:.5}"));
        for eps in [1.0 / n as f64, 2.0 / n as f64] {
            let exact = adversarial_risk(&set, eps);
            let mc = mc_adversarial_risk(&f, eps, &cfg)?.estimate;
            ok &= (mc - exact).abs() <= tol(exact);
            detail.push(format!("adv({eps:.4}) exact {exact:.5} mc {mc:.5}"));
        }
    }
    Ok((ok, detail.join("; ")))
}

fn check_quadratic_lobe() -> Result<(bool, String)> {
    let e = BilevelEnsemble::with_feature_count(32, 2.0, 1.95, 2049)?;
    let form = exact_form(&e)?;
    let set = exact_zero_crossings(&LearnedFunction::Dirichlet(form))?;
    let crossing = crossing_lobes(&set, &form);
    let k_star = crossing.last().copied().unwrap_or(0);
    let h = form.half_order();
    let lobes = ((h / form.n as f64) / 2.0).floor() as usize;
    let mut ok = k_star > 0;
    let mut worst: f64 = 0.0;
    for k in 1..=lobes {
        let lobe = quadratic_lobe(k, form.a, form.b, form.feature_count(), form.n)?;
        ok &= lobe.width.is_some() == crossing.contains(&k);
        if 2 * k <= k_star {
            let exact = set
                .roots
                .iter()
                .find(|&&(l, r)| l > 0.0 && (0.5 * (l + r) * h / 2.0).ceil() as usize == k)
                .map(|&(l, r)| r - l);
            match (lobe.width, exact) {
                (Some(m), Some(w)) => {
                    let rel = (m - w).abs() / w;
                    worst = worst.max(rel);
                    ok &= rel <= 0.10;
                }
                _ => ok = false,
            }
        }
    }
    Ok((
        ok,
        format!("{lobes} lobes checked, last crossing lobe {k_star}, worst relative width error {worst:.4}"),
    ))
}

fn check_padding_monotonicity() -> Result<(bool, String)> {
    let mut ok = true;
    let mut checked = 0;
    let forms = [
        DirichletForm::new(0.13, 0.0055, 30, 4930)?,
        exact_form(&build_ensemble(16, 2.0, 1.45)?)?,
        exact_form(&build_ensemble(64, 2.0, 1.75)?)?,
    ];
    for form in forms {
        let set = exact_zero_crossings(&LearnedFunction::Dirichlet(form))?;
        let mut prev = classification_risk(&set);
        let top = 2.0 / form.n as f64;
        for i in 1..=64 {
            let eps = top * i as f64 / 64.0;
            let risk = adversarial_risk(&set, eps);
            ok &= risk + 1e-15 >= prev;
            let padded = padded_intervals(&set, eps);
            ok &= padded.windows(2).all(|w| w[0].1 < w[1].0);
            ok &= set.roots.iter().all(|&(l, r)| {
                padded.iter().any(|&(pl, pr)| pl <= l && r <= pr) || form.period() <= r - l
            });
            prev = risk;
            checked += 1;
        }
    }
    Ok((ok, format!("{checked} epsilon values checked")))
}

fn check_critical_survival() -> Result<(bool, String)> {
    let q = 1.45;
    let grid: Vec<usize> = (3..=40).map(|k| 2 * k).collect();
    let mut first_adv = None;
    let mut first_below = None;
    for (i, &n) in grid.iter().enumerate() {
        let e = build_ensemble(n, 2.0, q)?;
        let form = exact_form(&e)?;
        let set = exact_zero_crossings(&LearnedFunction::Dirichlet(form))?;
        if first_adv.is_none() && adversarial_risk(&set, 2.0 / n as f64) == 1.0 {
            first_adv = Some(i);
        }
        let crit = critical_survival(n, e.feature_count)?;
        if first_below.is_none() && form.a < crit.a_c {
            first_below = Some(i);
        }
    }
    let ok = match (first_adv, first_below) {
        (Some(a), Some(b)) => a.abs_diff(b) <= 1,
        _ => false,
    };
    let at = |i: Option<usize>| {
        i.map(|i| grid[i].to_string())
            .unwrap_or_else(|| "none".into())
    };
    Ok((
        ok,
        format!(
            "adversarial risk reaches 1 at n={}, a drops below a_c at n={}",
            at(first_adv),
            at(first_below)
        ),
    ))
}
