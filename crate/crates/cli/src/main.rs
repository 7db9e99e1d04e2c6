use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use aliaslab::featurelift::{build_ensemble, BilevelEnsemble, LayoutKind};
use aliaslab::interpolate::closed_form_coeffs;
use aliaslab::xprun::{
    default_plot_metrics, emit, read_config, read_table, run_sweep, to_csv, to_json, to_svg,
    try_run_cell, validate, CellParams, EpsRule, Family, Format, Output, RunRecord, SweepKind,
    SweepSpec, DEFAULT_D_GRID, DEFAULT_N_GRID,
};
use clap::{Args, Parser, Subcommand};

/// Environment variable holding the default worker count.
const WORKERS_ENV: &str = "ALIASLAB_WORKERS";

#[derive(Parser)]
#[command(
    name = "aliaslab",
    version,
    about = "Minimum-norm interpolation of lifted features: risks and sweeps"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the interpolating coefficients of one ensemble.
    Coeffs(Common),
    /// Exact risks, bounds and theory quantities of one ensemble.
    Risk(Common),
    /// Sweep over the number of training points.
    SweepN(Common),
    /// Sweep over the random-feature width.
    SweepD(Common),
    /// Distance CDFs of misclassified test points.
    Cdf(Common),
    /// Run the validation suite.
    Validate(Common),
    /// Convert a stored table to another format.
    Emit(Common),
}

#[derive(Args, Clone, Default)]
struct Common {
    /// Number of training points.
    #[arg(long)]
    n: Option<usize>,
    /// Feature-count exponent, B ~ n^p.
    #[arg(long)]
    p: Option<f64>,
    /// Weighting exponent, gamma = n^-q.
    #[arg(long)]
    q: Option<f64>,
    /// Use exactly this many features.
    #[arg(long = "B-override")]
    b_override: Option<usize>,
    /// Training layout: grid or random.
    #[arg(long)]
    layout: Option<String>,
    /// Base seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Perturbation radius: 1/n, 2/n, 2pi/h or a number.
    #[arg(long)]
    eps: Option<String>,
    /// Output path; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format: csv, json or svg.
    #[arg(long)]
    format: Option<String>,
    /// Worker threads.
    #[arg(long, env = WORKERS_ENV)]
    workers: Option<usize>,
    /// Flat `key = value` file supplying defaults for the other flags.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Comma-separated values of the swept parameter.
    #[arg(long)]
    values: Option<String>,
    /// Number of seeds, starting at --seed.
    #[arg(long)]
    seeds: Option<u64>,
    /// Comma-separated metric groups: exact, mc, regression, coeffs, cdf.
    #[arg(long)]
    outputs: Option<String>,
    /// Feature family: fourier, legendre or rfs.
    #[arg(long)]
    family: Option<String>,
    /// Random-feature width.
    #[arg(long)]
    d: Option<usize>,
    /// Monte Carlo test points.
    #[arg(long)]
    n_test: Option<usize>,
    /// Input table for `emit`.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Column used as the x axis of SVG plots.
    #[arg(long)]
    x: Option<String>,
}

/// Failure carrying its exit code.
struct Fail {
    code: u8,
    message: String,
}

impl Fail {
    fn usage(message: impl Into<String>) -> Self {
        Fail {
            code: 2,
            message: message.into(),
        }
    }
}

impl From<aliaslab::Error> for Fail {
    fn from(e: aliaslab::Error) -> Self {
        Fail {
            code: if e.is_numerical() { 3 } else { 2 },
            message: e.to_string(),
        }
    }
}

type Outcome = Result<ExitCode, Fail>;

/// Command-line flags layered over an optional config file.
struct Settings {
    cli: Common,
    file: BTreeMap<String, String>,
}

impl Settings {
    fn load(cli: Common) -> Result<Self, Fail> {
        let file = match &cli.config {
            Some(path) => read_config(path)?,
            None => BTreeMap::new(),
        };
        const KEYS: [&str; 19] = [
            "n",
            "p",
            "q",
            "b_override",
            "layout",
            "seed",
            "eps",
            "out",
            "format",
            "workers",
            "values",
            "seeds",
            "outputs",
            "family",
            "d",
            "n_test",
            "input",
            "x",
            "inner_grid",
        ];
        if let Some(k) = file.keys().find(|k| !KEYS.contains(&k.as_str())) {
            return Err(Fail::usage(format!("unknown config key {k:?}")));
        }
        Ok(Settings { cli, file })
    }

    fn pick<T: FromStr>(&self, flag: Option<T>, key: &str) -> Result<Option<T>, Fail> {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.file.get(key) {
            Some(v) => v
                .parse()
                .map(Some)
                .map_err(|_| Fail::usage(format!("config key {key}: cannot parse {v:?}"))),
            None => Ok(None),
        }
    }

    fn require<T: FromStr>(&self, flag: Option<T>, key: &str) -> Result<T, Fail> {
        self.pick(flag, key)?
            .ok_or_else(|| Fail::usage(format!("--{key} is required")))
    }

    fn n(&self) -> Result<usize, Fail> {
        self.require(self.cli.n, "n")
    }
    fn p(&self) -> Result<f64, Fail> {
        Ok(self.pick(self.cli.p, "p")?.unwrap_or(2.0))
    }
    fn q(&self) -> Result<f64, Fail> {
        self.require(self.cli.q, "q")
    }
    fn b_override(&self) -> Result<Option<usize>, Fail> {
        self.pick(self.cli.b_override, "b_override")
    }
    fn seed(&self) -> Result<Option<u64>, Fail> {
        self.pick(self.cli.seed, "seed")
    }
    fn string(&self, flag: &Option<String>, key: &str) -> Option<String> {
        flag.clone().or_else(|| self.file.get(key).cloned())
    }
    fn out(&self) -> Option<PathBuf> {
        self.cli
            .out
            .clone()
            .or_else(|| self.file.get("out").map(PathBuf::from))
    }
    fn format(&self, default: Format) -> Result<Format, Fail> {
        match self.string(&self.cli.format, "format") {
            Some(f) => Ok(Format::parse(&f)?),
            None => Ok(default),
        }
    }
    fn layout(&self) -> Result<LayoutKind, Fail> {
        match self.string(&self.cli.layout, "layout").as_deref() {
            None | Some("grid") => Ok(LayoutKind::Grid),
            Some("random") => Ok(LayoutKind::Random),
            Some(other) => Err(Fail::usage(format!("unknown layout {other:?}"))),
        }
    }
    fn workers(&self) -> Result<Option<usize>, Fail> {
        self.pick(self.cli.workers, "workers")
    }
    fn seeds(&self) -> Result<Vec<u64>, Fail> {
        let base = self.seed()?.unwrap_or(0);
        let count = self.pick(self.cli.seeds, "seeds")?.unwrap_or(1);
        Ok((base..base + count).collect())
    }

    fn ensemble(&self) -> Result<BilevelEnsemble, Fail> {
        let (n, p, q) = (self.n()?, self.p()?, self.q()?);
        Ok(match self.b_override()? {
            Some(b) => BilevelEnsemble::with_feature_count(n, p, q, b)?,
            None => build_ensemble(n, p, q)?,
        })
    }

    /// Fixed parameters shared by every sweep.
    fn sweep_spec(
        &self,
        kind: SweepKind,
        varying: &str,
        default_values: Vec<f64>,
    ) -> Result<SweepSpec, Fail> {
        let values = match self.string(&self.cli.values, "values") {
            Some(list) => parse_list(&list)?,
            None => default_values,
        };
        let mut spec = SweepSpec::new(kind, varying, values);
        if varying != "n" {
            spec = spec.fix("n", self.n()?);
        }
        spec = spec.fix("p", self.p()?).fix("q", self.q()?);
        if let Some(b) = self.b_override()? {
            spec = spec.fix("b_override", b);
        }
        if let Some(l) = self.string(&self.cli.layout, "layout") {
            spec = spec.fix("layout", l);
        }
        if let Some(e) = self.string(&self.cli.eps, "eps") {
            EpsRule::parse(&e)?;
            spec = spec.fix("eps", e);
        }
        if let Some(f) = self.string(&self.cli.family, "family") {
            spec = spec.fix("family", f);
        }
        if let Some(d) = self.pick(self.cli.d, "d")? {
            if varying != "d" {
                spec = spec.fix("d", d);
            }
        }
        if let Some(t) = self.pick(self.cli.n_test, "n_test")? {
            spec = spec.fix("n_test", t);
        }
        if let Some(g) = self.file.get("inner_grid") {
            spec = spec.fix("inner_grid", g);
        }
        if let Some(o) = self.string(&self.cli.outputs, "outputs") {
            let list: Vec<&str> = o.split(',').map(str::trim).collect();
            spec = spec.with_outputs(&list);
        }
        let stochastic = self.layout()? == LayoutKind::Random
            || matches!(kind, SweepKind::OverD | SweepKind::Cdf)
            || spec.outputs.iter().any(|o| o == "mc" || o == "cdf")
            || spec.fixed.get("family").is_some_and(|f| f == "rfs");
        if stochastic {
            spec = spec.with_seeds(self.seeds()?);
        } else if let Some(s) = self.seed()? {
            spec = spec.fix("seed", s);
        }
        spec.validate()?;
        Ok(spec)
    }
}

fn parse_list(list: &str) -> Result<Vec<f64>, Fail> {
    list.split(',')
        .map(|s| {
            s.trim()
                .parse()
                .map_err(|_| Fail::usage(format!("bad list entry {s:?}")))
        })
        .collect()
}

fn write_output(text: &str, out: Option<&Path>) -> Result<(), Fail> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| Fail {
            code: 2,
            message: format!("cannot write {}: {e}", path.display()),
        }),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| Fail {
                    code: 2,
                    message: format!("cannot write to stdout: {e}"),
                })
        }
    }
}

fn render(records: &[RunRecord], format: Format, x_field: &str) -> Result<String, Fail> {
    Ok(match format {
        Format::Csv => to_csv(records)?,
        Format::Json => to_json(records)?,
        Format::Svg => to_svg(records, x_field, &default_plot_metrics(records))?,
    })
}

fn cmd_coeffs(s: &Settings) -> Outcome {
    let e = s.ensemble()?;
    let cv = closed_form_coeffs(&e)?;
    let format = s.format(Format::Json)?;
    let text = match format {
        Format::Json => {
            format!("{}\n", coeffs_json(&e, &cv))
        }
        Format::Csv => {
            let mut t = String::from("index,alpha\n");
            for (i, a) in cv.alpha.iter().enumerate().filter(|(_, a)| **a != 0.0) {
                t.push_str(&format!("{i},{a}\n"));
            }
            t
        }
        Format::Svg => return Err(Fail::usage("coeffs supports csv or json")),
    };
    write_output(&text, s.out().as_deref())?;
    Ok(ExitCode::SUCCESS)
}

fn coeffs_json(
    e: &BilevelEnsemble,
    cv: &aliaslab::interpolate::CoefficientVector,
) -> serde_json::Value {
    let nonzero: Vec<(usize, f64)> = cv
        .alpha
        .iter()
        .copied()
        .enumerate()
        .filter(|(_, a)| *a != 0.0)
        .collect();
    serde_json::json!({
        "n": e.n,
        "p": e.p,
        "q": e.q,
        "feature_count": e.feature_count,
        "alias_count": e.alias_count(),
        "a": cv.a,
        "b": cv.b,
        "nonzero_alpha": nonzero,
    })
}

fn cmd_risk(s: &Settings) -> Outcome {
    let mut cell = CellParams::new(s.n()?, s.p()?, s.q()?);
    cell.b_override = s.b_override()?;
    cell.layout = s.layout()?;
    cell.seed = s.seed()?;
    if let Some(f) = s.string(&s.cli.family, "family") {
        cell.family = Family::parse(&f)?;
    }
    cell.d = s.pick(s.cli.d, "d")?;
    if let Some(e) = s.string(&s.cli.eps, "eps") {
        cell.eps = EpsRule::parse(&e)?;
    }
    if let Some(t) = s.pick(s.cli.n_test, "n_test")? {
        cell.n_test = t;
    }
    if let Some(o) = s.string(&s.cli.outputs, "outputs") {
        cell.outputs = o
            .split(',')
            .map(Output::parse)
            .collect::<aliaslab::Result<_>>()?;
    }
    let rec = try_run_cell(&cell, false)?;
    let text = render(std::slice::from_ref(&rec), s.format(Format::Json)?, "n")?;
    write_output(&text, s.out().as_deref())?;
    Ok(ExitCode::SUCCESS)
}

fn run_table(s: &Settings, spec: SweepSpec, x_field: &str) -> Outcome {
    let records = run_sweep(&spec)?;
    let failed = records.iter().filter(|r| !r.is_ok()).count();
    if failed > 0 {
        eprintln!("{failed} of {} rows failed", records.len());
    }
    let format = s.format(Format::Csv)?;
    match s.out() {
        Some(path) => emit(&records, format, &path, x_field)?,
        None => write_output(&render(&records, format, x_field)?, None)?,
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_sweep_n(s: &Settings) -> Outcome {
    let grid = DEFAULT_N_GRID.iter().map(|&n| n as f64).collect();
    let spec = s.sweep_spec(SweepKind::OverN, "n", grid)?;
    run_table(s, spec, "n")
}

fn cmd_sweep_d(s: &Settings) -> Outcome {
    let grid = DEFAULT_D_GRID.iter().map(|&d| d as f64).collect();
    let spec = s.sweep_spec(SweepKind::OverD, "d", grid)?;
    run_table(s, spec, "d")
}

fn cmd_cdf(s: &Settings) -> Outcome {
    let n = s.n()? as f64;
    let spec = s.sweep_spec(SweepKind::Cdf, "d", vec![0.0, 2.0 * n, 8192.0])?;
    run_table(s, spec, "d")
}

fn cmd_validate(s: &Settings) -> Outcome {
    let report = validate();
    for c in &report.checks {
        eprintln!(
            "{} {} ({:.2}s): {}",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            c.seconds,
            c.detail
        );
    }
    write_output(&format!("{}\n", report.to_json()), s.out().as_deref())?;
    Ok(if report.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn cmd_emit(s: &Settings) -> Outcome {
    let input = s
        .cli
        .input
        .clone()
        .or_else(|| s.file.get("input").map(PathBuf::from))
        .ok_or_else(|| Fail::usage("--input is required"))?;
    let records = read_table(&input)?;
    let x = s.string(&s.cli.x, "x").unwrap_or_else(|| "n".into());
    let format = s.format(Format::Csv)?;
    match s.out() {
        Some(path) => emit(&records, format, &path, &x)?,
        None => write_output(&render(&records, format, &x)?, None)?,
    }
    Ok(ExitCode::SUCCESS)
}

fn run(cli: Cli) -> Outcome {
    let (common, handler): (Common, fn(&Settings) -> Outcome) = match cli.command {
        Command::Coeffs(c) => (c, cmd_coeffs),
        Command::Risk(c) => (c, cmd_risk),
        Command::SweepN(c) => (c, cmd_sweep_n),
        Command::SweepD(c) => (c, cmd_sweep_d),
        Command::Cdf(c) => (c, cmd_cdf),
        Command::Validate(c) => (c, cmd_validate),
        Command::Emit(c) => (c, cmd_emit),
    };
    let settings = Settings::load(common)?;
    if let Some(w) = settings.workers()? {
        if w == 0 {
            return Err(Fail::usage("--workers must be positive"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build_global()
            .map_err(|e| Fail::usage(format!("cannot start worker pool: {e}")))?;
    }
    handler(&settings)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
