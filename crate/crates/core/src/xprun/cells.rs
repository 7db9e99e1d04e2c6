use std::f64::consts::{PI, SQRT_2};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::record::{finite, RunRecord};
use crate::error::{invalid, Error, Result};
use crate::featurelift::{
    build_ensemble, make_training_set, BilevelEnsemble, LayoutKind, TrainingSet,
};
use crate::interpolate::{closed_form_coeffs, min_norm_legendre, solve_bilevel_kernel, solve_rfs};
use crate::mcestim::{
    alias_statistics, ks_distance, mc_adversarial_risk, mc_classification_risk,
    misclassified_distance_cdf, McConfig,
};
use crate::riskexact::{
    adversarial_risk, bilevel_predictions, classification_risk, critical_survival, crossing_lobes,
    exact_zero_crossings, k_star_bounds, risk_bounds, DirichletForm, LearnedFunction,
};

/// Default Monte Carlo test-set size.
pub const DEFAULT_N_TEST: usize = 20_000;

/// Feature family of a cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Fourier,
    Legendre,
    Rfs,
}

impl Family {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "fourier" => Ok(Family::Fourier),
            "legendre" => Ok(Family::Legendre),
            "rfs" => Ok(Family::Rfs),
            other => Err(invalid(format!("unknown family {other:?}"))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Family::Fourier => "fourier",
            Family::Legendre => "legendre",
            Family::Rfs => "rfs",
        }
    }
}

/// Epsilon rule relative to the ensemble.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum EpsRule {
    OneOverN,
    TwoOverN,
    TwoPiOverH,
    Fixed(f64),
}

impl EpsRule {
    pub fn parse(s: &str) -> Result<Self> {
        match s.trim() {
            "1/n" => Ok(EpsRule::OneOverN),
            "2/n" => Ok(EpsRule::TwoOverN),
            "2pi/h" => Ok(EpsRule::TwoPiOverH),
            other => other
                .parse::<f64>()
                .ok()
                .filter(|e| *e >= 0.0 && e.is_finite())
                .map(EpsRule::Fixed)
                .ok_or_else(|| invalid(format!("bad epsilon rule {other:?}"))),
        }
    }

    pub fn label(&self) -> String {
        match self {
            EpsRule::OneOverN => "1/n".into(),
            EpsRule::TwoOverN => "2/n".into(),
            EpsRule::TwoPiOverH => "2pi/h".into(),
            EpsRule::Fixed(e) => format!("{e}"),
        }
    }

    pub fn value(&self, n: usize, feature_count: usize) -> f64 {
        let nf = n as f64;
        match *self {
            EpsRule::OneOverN => 1.0 / nf,
            EpsRule::TwoOverN => 2.0 / nf,
            EpsRule::TwoPiOverH => 2.0 * PI / ((feature_count as f64 - 1.0 + nf) / 2.0),
            EpsRule::Fixed(e) => e,
        }
    }
}

/// Metric groups a cell can compute.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Output {
    /// Zero-crossing risks and theory quantities.
    Exact,
    /// Monte Carlo classification and adversarial risks.
    Mc,
    /// Regression error against the constant truth.
    Regression,
    /// Distance to the closed-form coefficients and alias statistics.
    Coeffs,
    /// Distance CDF of misclassified points and KS distance to Fourier.
    Cdf,
}

impl Output {
    pub fn parse(s: &str) -> Result<Self> {
        match s.trim() {
            "exact" => Ok(Output::Exact),
            "mc" => Ok(Output::Mc),
            "regression" => Ok(Output::Regression),
            "coeffs" => Ok(Output::Coeffs),
            "cdf" => Ok(Output::Cdf),
            other => Err(invalid(format!("unknown output {other:?}"))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Output::Exact => "exact",
            Output::Mc => "mc",
            Output::Regression => "regression",
            Output::Coeffs => "coeffs",
            Output::Cdf => "cdf",
        }
    }
}

/// Fully resolved inputs of one sweep cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellParams {
    pub sweep: String,
    pub family: Family,
    pub layout: LayoutKind,
    pub n: usize,
    pub p: f64,
    pub q: f64,
    pub b_override: Option<usize>,
    pub d: Option<usize>,
    pub seed: Option<u64>,
    pub eps: EpsRule,
    pub n_test: usize,
    pub inner_grid: usize,
    pub outputs: Vec<Output>,
}

impl CellParams {
    pub fn new(n: usize, p: f64, q: f64) -> Self {
        Self {
            sweep: "single".into(),
            family: Family::Fourier,
            layout: LayoutKind::Grid,
            n,
            p,
            q,
            b_override: None,
            d: None,
            seed: None,
            eps: EpsRule::OneOverN,
            n_test: DEFAULT_N_TEST,
            inner_grid: 0,
            outputs: vec![Output::Exact],
        }
    }

    pub fn ensemble(&self) -> Result<BilevelEnsemble> {
        match self.b_override {
            Some(b) => BilevelEnsemble::with_feature_count(self.n, self.p, self.q, b),
            None => build_ensemble(self.n, self.p, self.q),
        }
    }

    fn wants(&self, o: Output) -> bool {
        self.outputs.contains(&o)
    }

    fn base_record(&self) -> RunRecord {
        RunRecord {
            sweep: self.sweep.clone(),
            family: self.family.name().into(),
            layout: match self.layout {
                LayoutKind::Grid => "grid".into(),
                LayoutKind::Random => "random".into(),
            },
            n: self.n as u64,
            p: self.p,
            q: self.q,
            b_override: self.b_override.map(|b| b as u64),
            d: self.d.map(|d| d as u64),
            seed: self.seed,
            eps_rule: self.eps.label(),
            n_test: self.wants_mc().then_some(self.n_test as u64),
            inner_grid: self.wants_mc().then_some(self.inner_grid as u64),
            outputs: self
                .outputs
                .iter()
                .map(|o| o.name())
                .collect::<Vec<_>>()
                .join(";"),
            version: crate::VERSION.into(),
            status: "ok".into(),
            ..RunRecord::default()
        }
    }

    fn wants_mc(&self) -> bool {
        self.wants(Output::Mc) || self.wants(Output::Cdf)
    }

    fn mc_config(&self) -> McConfig {
        McConfig::new(self.n_test, self.seed.unwrap_or(0)).with_inner_grid(self.inner_grid)
    }

    /// Rebuilds the parameters stored in a record.
    pub fn from_record(r: &RunRecord) -> Result<Self> {
        let layout = match r.layout.as_str() {
            "grid" => LayoutKind::Grid,
            "random" => LayoutKind::Random,
            other => return Err(invalid(format!("unknown layout {other:?}"))),
        };
        let outputs = r
            .outputs
            .split(';')
            .filter(|s| !s.is_empty())
            .map(Output::parse)
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            sweep: r.sweep.clone(),
            family: Family::parse(&r.family)?,
            layout,
            n: r.n as usize,
            p: r.p,
            q: r.q,
            b_override: r.b_override.map(|b| b as usize),
            d: r.d.map(|d| d as usize),
            seed: r.seed,
            eps: EpsRule::parse(&r.eps_rule)?,
            n_test: r.n_test.map_or(DEFAULT_N_TEST, |v| v as usize),
            inner_grid: r.inner_grid.map_or(0, |v| v as usize),
            outputs,
        })
    }
}

/// Learned function of a cell and what is known about its structure.
struct Model {
    function: LearnedFunction,
    ensemble: BilevelEnsemble,
    train: TrainingSet,
    /// Dirichlet form when the closed-form analysis applies.
    form: Option<DirichletForm>,
    /// Coefficients on the orthonormal basis (Fourier or Legendre).
    alpha: Option<Vec<f64>>,
}

fn build_model(cell: &CellParams) -> Result<Model> {
    let ensemble = cell.ensemble()?;
    let train = make_training_set(cell.n, cell.layout, cell.seed)?;
    let grid = cell.layout == LayoutKind::Grid;
    match cell.family {
        Family::Fourier => {
            if grid {
                if let Ok(cv) = closed_form_coeffs(&ensemble) {
                    let form = DirichletForm::from_coefficients(&cv, &ensemble)?;
                    return Ok(Model {
                        function: LearnedFunction::Dirichlet(form),
                        ensemble,
                        train,
                        form: Some(form),
                        alpha: Some(cv.alpha),
                    });
                }
            }
            let k = solve_bilevel_kernel(&ensemble, &train)?;
            let alpha = k.coefficients().alpha;
            Ok(Model {
                function: LearnedFunction::Kernel(k),
                ensemble,
                train,
                form: None,
                alpha: Some(alpha),
            })
        }
        Family::Legendre => {
            let cv = min_norm_legendre(&ensemble, &train)?;
            Ok(Model {
                function: LearnedFunction::Legendre {
                    alpha: cv.alpha.clone(),
                },
                ensemble,
                train,
                form: None,
                alpha: Some(cv.alpha),
            })
        }
        Family::Rfs => {
            let d = cell
                .d
                .ok_or_else(|| invalid("random-feature cells need d"))?;
            let seed = cell.seed.ok_or(Error::MissingSeed)?;
            let sol = solve_rfs(&ensemble, &train, d, seed)?;
            let alpha = sol.alpha_eff.clone();
            Ok(Model {
                function: LearnedFunction::Rfs(sol),
                ensemble,
                train,
                form: None,
                alpha: Some(alpha),
            })
        }
    }
}

/// `E (f - 1)^2` under Unif[-1, 1] for coefficients on a basis that is
/// orthonormal for Lebesgue measure with constant feature `1/sqrt2`.
pub fn regression_mse(alpha: &[f64]) -> f64 {
    let head = (alpha[0] - SQRT_2).powi(2);
    let tail: f64 = alpha[1..].iter().map(|a| a * a).sum();
    0.5 * (head + tail)
}

/// Runs one cell. Failures are recorded in `status`, never raised.
pub fn run_cell(cell: &CellParams, record_timing: bool) -> RunRecord {
    let start = Instant::now();
    let mut rec = cell.base_record();
    if let Err(e) = fill_record(cell, &mut rec) {
        rec.status = format!("failed: {e}");
    }
    if record_timing {
        rec.wall_time_s = Some(start.elapsed().as_secs_f64());
    }
    rec
}

/// Runs one cell and returns the first error instead of recording it.
pub fn try_run_cell(cell: &CellParams, record_timing: bool) -> Result<RunRecord> {
    let start = Instant::now();
    let mut rec = cell.base_record();
    fill_record(cell, &mut rec)?;
    if record_timing {
        rec.wall_time_s = Some(start.elapsed().as_secs_f64());
    }
    Ok(rec)
}

/// Re-executes the cell described by a record.
pub fn rerun(record: &RunRecord) -> Result<RunRecord> {
    let cell = CellParams::from_record(record)?;
    Ok(run_cell(&cell, false))
}

fn fill_record(cell: &CellParams, rec: &mut RunRecord) -> Result<()> {
    let ensemble = cell.ensemble()?;
    let nb = ensemble.feature_count;
    rec.feature_count = Some(nb as u64);
    rec.n_aliases = Some(ensemble.alias_ratio());
    let pred = bilevel_predictions(&ensemble);
    rec.n0 = pred.n0;
    rec.regime = Some(pred.regime.name().into());
    if let Ok(c) = critical_survival(cell.n, nb) {
        rec.a_critical = Some(c.a_c);
    }

    let model = build_model(cell)?;
    if let Some(form) = model.form {
        rec.a = Some(form.a);
        rec.b = Some(form.b);
        let ks = k_star_bounds(form.a, form.b, nb as f64, cell.n);
        let rb = risk_bounds(form.a, form.b, nb as f64, cell.n);
        rec.k_star_upper = finite(ks.upper);
        rec.positive_condition = Some(ks.positive_condition);
        rec.bound_classification = Some(rb.classification);
        rec.bound_adv_small = Some(rb.adv_small);
    } else if let Some(alpha) = &model.alpha {
        rec.a = Some(alpha[0]);
    }

    if cell.wants(Output::Exact) {
        let set = exact_zero_crossings(&model.function)?;
        let nf = cell.n as f64;
        rec.classification_exact = Some(classification_risk(&set));
        rec.adversarial_exact_1n = Some(adversarial_risk(&set, 1.0 / nf));
        rec.adversarial_exact_2n = Some(adversarial_risk(&set, 2.0 / nf));
        rec.adversarial_exact_small = Some(adversarial_risk(
            &set,
            EpsRule::TwoPiOverH.value(cell.n, nb),
        ));
        if let Some(form) = model.form {
            rec.k_star = Some(crossing_lobes(&set, &form).last().copied().unwrap_or(0) as u64);
        }
    }

    if cell.wants(Output::Mc) {
        let cfg = cell.mc_config();
        let c = mc_classification_risk(&model.function, &cfg)?;
        rec.classification_mc = Some(c.estimate);
        rec.classification_mc_stderr = Some(c.stderr);
        let a = mc_adversarial_risk(&model.function, cell.eps.value(cell.n, nb), &cfg)?;
        rec.adversarial_mc = Some(a.estimate);
        rec.adversarial_mc_stderr = Some(a.stderr);
    }

    if cell.wants(Output::Regression) {
        if let Some(alpha) = &model.alpha {
            rec.regression_mse = Some(regression_mse(alpha));
        }
    }

    if cell.wants(Output::Coeffs) {
        if let (Some(alpha), Family::Rfs | Family::Fourier) = (&model.alpha, cell.family) {
            if let Ok(closed) = closed_form_coeffs(&model.ensemble) {
                let err: f64 = alpha
                    .iter()
                    .zip(&closed.alpha)
                    .map(|(x, y)| (x - y).powi(2))
                    .sum::<f64>()
                    .sqrt();
                rec.coeff_error = Some(err);
            }
            if model.ensemble.alias_count().is_some() {
                let st = alias_statistics(alpha, cell.n, nb);
                rec.avg_alias_weight = finite(st.avg_alias_weight);
                rec.alias_p30 = finite(st.alias_p30);
                rec.alias_p70 = finite(st.alias_p70);
                rec.non_alias_energy = Some(st.non_alias_energy);
            }
        }
    }

    if cell.wants(Output::Cdf) {
        let cfg = cell.mc_config();
        let cdf = misclassified_distance_cdf(&model.function, &model.train, &cfg)?;
        rec.cdf = Some(
            cdf.cdf
                .iter()
                .map(|(_, v)| format!("{v}"))
                .collect::<Vec<_>>()
                .join(";"),
        );
        rec.cdf_within_half = Some(cdf.fraction_within(0.5));
        let reference = if cell.family == Family::Fourier {
            cdf.clone()
        } else {
            let mut fourier_cell = cell.clone();
            fourier_cell.family = Family::Fourier;
            fourier_cell.d = None;
            let fm = build_model(&fourier_cell)?;
            misclassified_distance_cdf(&fm.function, &fm.train, &cfg)?
        };
        rec.ks_to_fourier = Some(ks_distance(&cdf, &reference));
    }
    Ok(())
}
