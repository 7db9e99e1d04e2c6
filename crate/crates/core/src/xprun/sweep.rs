use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::cells::{run_cell, CellParams, EpsRule, Family, Output, DEFAULT_N_TEST};
use super::record::RunRecord;
use crate::error::{invalid, Result};
use crate::featurelift::LayoutKind;

/// Default sample sizes for sweeps over `n`.
pub const DEFAULT_N_GRID: [usize; 6] = [8, 16, 30, 64, 128, 256];

/// Default bias exponents, straddling every regime boundary at `p = 2`.
pub const DEFAULT_Q_GRID: [f64; 6] = [0.5, 1.0, 1.25, 1.45, 1.75, 2.0];

/// Default random-feature widths for `n = 8`: from `n/2` through `d >> B`.
pub const DEFAULT_D_GRID: [usize; 15] = [
    4, 6, 8, 10, 12, 16, 32, 64, 128, 256, 512, 1024, 2048, 4096, 8192,
];

/// Kind of sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepKind {
    OverN,
    OverD,
    OverQ,
    /// Sweep over `n` for every `q` in the fixed `q_list`.
    Phase,
    /// Distance CDFs, varying the random-feature width (0 = Fourier).
    Cdf,
}

impl SweepKind {
    pub fn name(&self) -> &'static str {
        match self {
            SweepKind::OverN => "over_n",
            SweepKind::OverD => "over_d",
            SweepKind::OverQ => "over_q",
            SweepKind::Phase => "phase",
            SweepKind::Cdf => "cdf",
        }
    }
}

/// Declarative sweep: fixed parameters, one varying parameter, seeds, and the
/// metric groups to compute.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub kind: SweepKind,
    pub fixed: BTreeMap<String, String>,
    pub varying: (String, Vec<f64>),
    pub seeds: Vec<u64>,
    pub outputs: Vec<String>,
    /// Record per-cell wall time; off by default so tables are reproducible
    /// byte for byte.
    #[serde(default)]
    pub record_timing: bool,
}

const KNOWN_KEYS: [&str; 12] = [
    "n",
    "p",
    "q",
    "b_override",
    "layout",
    "family",
    "d",
    "eps",
    "n_test",
    "inner_grid",
    "q_list",
    "seed",
];

impl SweepSpec {
    pub fn new(kind: SweepKind, varying: &str, values: Vec<f64>) -> Self {
        Self {
            kind,
            fixed: BTreeMap::new(),
            varying: (varying.to_string(), values),
            seeds: Vec::new(),
            outputs: Vec::new(),
            record_timing: false,
        }
    }

    pub fn fix(mut self, key: &str, value: impl ToString) -> Self {
        self.fixed.insert(key.to_string(), value.to_string());
        self
    }

    pub fn with_seeds(mut self, seeds: Vec<u64>) -> Self {
        self.seeds = seeds;
        self
    }

    pub fn with_outputs(mut self, outputs: &[&str]) -> Self {
        self.outputs = outputs.iter().map(|s| s.to_string()).collect();
        self
    }

    fn is_stochastic(&self) -> bool {
        let random = self.fixed.get("layout").is_some_and(|l| l == "random");
        let rfs = self.fixed.get("family").is_some_and(|f| f == "rfs");
        let mc = self.outputs.iter().any(|o| o == "mc" || o == "cdf");
        random || rfs || mc || matches!(self.kind, SweepKind::OverD | SweepKind::Cdf)
    }

    /// Checks the spec's structural invariants.
    pub fn validate(&self) -> Result<()> {
        let (name, values) = &self.varying;
        if self.fixed.contains_key(name) {
            return Err(invalid(format!("{name} is both fixed and varying")));
        }
        if values.is_empty() {
            return Err(invalid("varying parameter has no values"));
        }
        if let Some(k) = self
            .fixed
            .keys()
            .find(|k| !KNOWN_KEYS.contains(&k.as_str()))
        {
            return Err(invalid(format!("unknown parameter {k:?}")));
        }
        if !KNOWN_KEYS.contains(&name.as_str()) {
            return Err(invalid(format!("unknown varying parameter {name:?}")));
        }
        if self.is_stochastic() && self.seeds.is_empty() {
            return Err(invalid("stochastic sweeps need at least one seed"));
        }
        if self.kind == SweepKind::Phase && !self.fixed.contains_key("q_list") {
            return Err(invalid("phase sweeps need a fixed q_list"));
        }
        Ok(())
    }

    /// Expands into cells in a fixed order: (q_list entry,) varying value, seed.
    pub fn cells(&self) -> Result<Vec<CellParams>> {
        self.validate()?;
        let q_list: Vec<Option<f64>> = match self.fixed.get("q_list") {
            Some(list) => list
                .split(',')
                .map(|s| parse_f64("q_list", s).map(Some))
                .collect::<Result<_>>()?,
            None => vec![None],
        };
        let seeds: Vec<Option<u64>> = if self.seeds.is_empty() {
            vec![None]
        } else {
            self.seeds.iter().copied().map(Some).collect()
        };
        let mut cells = Vec::new();
        for q in &q_list {
            for &v in &self.varying.1 {
                for &seed in &seeds {
                    let mut map = self.fixed.clone();
                    map.remove("q_list");
                    if let Some(q) = q {
                        map.insert("q".into(), format!("{q}"));
                    }
                    map.insert(self.varying.0.clone(), format!("{v}"));
                    cells.push(self.cell_from_map(&map, seed)?);
                }
            }
        }
        Ok(cells)
    }

    fn cell_from_map(
        &self,
        map: &BTreeMap<String, String>,
        seed: Option<u64>,
    ) -> Result<CellParams> {
        let get = |k: &str| map.get(k).map(String::as_str);
        let n = parse_usize("n", get("n").ok_or_else(|| invalid("n is required"))?)?;
        let p = get("p").map_or(Ok(2.0), |s| parse_f64("p", s))?;
        let q = parse_f64("q", get("q").ok_or_else(|| invalid("q is required"))?)?;
        let mut cell = CellParams::new(n, p, q);
        cell.sweep = self.kind.name().into();
        cell.seed = seed.or(get("seed").map(|s| parse_u64("seed", s)).transpose()?);
        if let Some(b) = get("b_override") {
            cell.b_override = Some(parse_usize("b_override", b)?);
        }
        if let Some(l) = get("layout") {
            cell.layout = match l {
                "grid" => LayoutKind::Grid,
                "random" => LayoutKind::Random,
                other => return Err(invalid(format!("unknown layout {other:?}"))),
            };
        }
        if let Some(f) = get("family") {
            cell.family = Family::parse(f)?;
        }
        if let Some(d) = get("d") {
            let d = parse_usize("d", d)?;
            cell.d = (d > 0).then_some(d);
            if self.kind == SweepKind::Cdf {
                cell.family = if d > 0 { Family::Rfs } else { Family::Fourier };
            }
        }
        if self.kind == SweepKind::OverD {
            cell.family = Family::Rfs;
        }
        if let Some(e) = get("eps") {
            cell.eps = EpsRule::parse(e)?;
        }
        cell.n_test = get("n_test").map_or(Ok(DEFAULT_N_TEST), |s| parse_usize("n_test", s))?;
        cell.inner_grid = get("inner_grid").map_or(Ok(0), |s| parse_usize("inner_grid", s))?;
        cell.outputs = if self.outputs.is_empty() {
            default_outputs(self.kind)
        } else {
            self.outputs
                .iter()
                .map(|o| Output::parse(o))
                .collect::<Result<_>>()?
        };
        Ok(cell)
    }
}

fn default_outputs(kind: SweepKind) -> Vec<Output> {
    match kind {
        SweepKind::OverN | SweepKind::OverQ | SweepKind::Phase => {
            vec![Output::Exact, Output::Regression]
        }
        SweepKind::OverD => vec![Output::Mc, Output::Regression, Output::Coeffs],
        SweepKind::Cdf => vec![Output::Cdf],
    }
}

fn parse_f64(key: &str, s: &str) -> Result<f64> {
    s.trim()
        .parse()
        .map_err(|_| invalid(format!("{key}: expected a number, got {s:?}")))
}

fn parse_u64(key: &str, s: &str) -> Result<u64> {
    let v = parse_f64(key, s)?;
    if v < 0.0 || v.fract() != 0.0 || v > u64::MAX as f64 {
        return Err(invalid(format!(
            "{key}: expected a non-negative integer, got {s:?}"
        )));
    }
    Ok(v as u64)
}

fn parse_usize(key: &str, s: &str) -> Result<usize> {
    parse_u64(key, s).map(|v| v as usize)
}

/// Runs every cell of the spec in parallel. Row count always equals the number
/// of cells; failures are kept as rows with a `failed` status.
pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<RunRecord>> {
    let cells = spec.cells()?;
    Ok(cells
        .par_iter()
        .map(|c| run_cell(c, spec.record_timing))
        .collect())
}

/// Sweep over `n` with fixed `(p, q)`.
pub fn sweep_over_n(spec: &SweepSpec) -> Result<Vec<RunRecord>> {
    if spec.varying.0 != "n" {
        return Err(invalid("sweep_over_n varies n"));
    }
    run_sweep(spec)
}

/// Sweep over the random-feature width `d`.
pub fn sweep_over_d(spec: &SweepSpec) -> Result<Vec<RunRecord>> {
    if spec.varying.0 != "d" || spec.kind != SweepKind::OverD {
        return Err(invalid("sweep_over_d varies d in an over_d sweep"));
    }
    run_sweep(spec)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        let spec = SweepSpec::new(SweepKind::OverN, "n", vec![8.0]).fix("n", 8);
        assert!(spec.validate().is_err());
        let spec = SweepSpec::new(SweepKind::OverD, "d", vec![8.0])
            .fix("n", 8)
            .fix("q", 1.45);
        assert!(spec.validate().is_err());
        let spec = SweepSpec::new(SweepKind::OverN, "n", vec![8.0]).fix("bogus", 1);
        assert!(spec.validate().is_err());
    }

    #[test]
    fn failed_rows_are_kept() {
        let spec = SweepSpec::new(SweepKind::OverN, "n", vec![8.0, 1.0, 16.0]).fix("q", 1.45);
        let rows = sweep_over_n(&spec).unwrap();
        assert_eq!(rows.len(), 3);
        assert!(rows[0].is_ok() && rows[2].is_ok());
        assert!(rows[1].status.starts_with("failed"));
    }

    #[test]
    fn phase_expands_q_list() {
        let spec = SweepSpec::new(SweepKind::Phase, "n", vec![8.0, 16.0]).fix("q_list", "0.5,1.45");
        let cells = spec.cells().unwrap();
        assert_eq!(cells.len(), 4);
        assert_eq!(cells[3].q, 1.45);
        assert_eq!(cells[3].n, 16);
    }
}
