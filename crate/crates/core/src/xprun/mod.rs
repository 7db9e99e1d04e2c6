//! Parameter sweeps, run records, output tables, configuration files and the
//! validation suite.

mod cells;
mod config;
mod emit;
mod record;
mod sweep;
mod validate;

pub use cells::{
    regression_mse, rerun, run_cell, try_run_cell, CellParams, EpsRule, Family, Output,
    DEFAULT_N_TEST,
};
pub use config::{parse_config, read_config};
pub use emit::{
    default_plot_metrics, emit, from_csv, from_json, read_table, to_csv, to_json, to_svg, Format,
};
pub use record::RunRecord;
pub use sweep::{
    run_sweep, sweep_over_d, sweep_over_n, SweepKind, SweepSpec, DEFAULT_D_GRID, DEFAULT_N_GRID,
    DEFAULT_Q_GRID,
};
pub use validate::{validate, validate_only, CheckResult, ValidationReport, CHECKS};
