use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use super::record::RunRecord;
use crate::error::{invalid, Error, Result};

/// Output format of [`emit`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
    Svg,
}

impl Format {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            "svg" => Ok(Format::Svg),
            other => Err(invalid(format!("unknown format {other:?}"))),
        }
    }
}

/// CSV with one column per record field in lexicographic order.
pub fn to_csv(records: &[RunRecord]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    if records.is_empty() {
        w.write_record(RunRecord::field_names()).map_err(csv_err)?;
    }
    for r in records {
        w.serialize(r).map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Parse(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Parse(e.to_string()))
}

/// Parses a table written by [`to_csv`].
pub fn from_csv(text: &str) -> Result<Vec<RunRecord>> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    r.deserialize().map(|row| row.map_err(csv_err)).collect()
}

/// JSON array of records.
pub fn to_json(records: &[RunRecord]) -> Result<String> {
    serde_json::to_string_pretty(records).map_err(|e| Error::Parse(e.to_string()))
}

pub fn from_json(text: &str) -> Result<Vec<RunRecord>> {
    serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}

fn csv_err(e: csv::Error) -> Error {
    Error::Parse(e.to_string())
}

/// Line plot of `metrics` against `x_field`, one polyline per metric with the
/// median over seeds at each x. The x axis is logarithmic when the values
/// are positive and span at least a factor of 16.
pub fn to_svg(records: &[RunRecord], x_field: &str, metrics: &[&str]) -> Result<String> {
    const W: f64 = 640.0;
    const H: f64 = 400.0;
    const M: f64 = 60.0;
    const COLORS: [&str; 6] = [
        "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf",
    ];

    let mut series: Vec<(String, Vec<(f64, f64)>)> = Vec::new();
    for m in metrics {
        let mut by_x: BTreeMap<u64, (f64, Vec<f64>)> = BTreeMap::new();
        for r in records.iter().filter(|r| r.is_ok()) {
            if let (Some(x), Some(y)) = (r.metric(x_field), r.metric(m)) {
                by_x.entry(x.to_bits()).or_insert((x, Vec::new())).1.push(y);
            }
        }
        let mut pts: Vec<(f64, f64)> = by_x
            .into_values()
            .map(|(x, ys)| (x, crate::mcestim::percentile(&ys, 50.0)))
            .collect();
        pts.sort_by(|a, b| a.0.total_cmp(&b.0));
        if !pts.is_empty() {
            series.push((m.to_string(), pts));
        }
    }
    if series.is_empty() {
        return Err(invalid(format!(
            "no data for {metrics:?} against {x_field}"
        )));
    }
    let xs: Vec<f64> = series
        .iter()
        .flat_map(|s| s.1.iter().map(|p| p.0))
        .collect();
    let ys: Vec<f64> = series
        .iter()
        .flat_map(|s| s.1.iter().map(|p| p.1))
        .collect();
    let (xmin, xmax) = min_max(&xs);
    let (ymin, ymax) = min_max(&ys);
    let log_x = xmin > 0.0 && xmax / xmin >= 16.0;
    let tx = |x: f64| if log_x { x.ln() } else { x };
    let (ax, bx) = (tx(xmin), tx(xmax));
    let span_x = if bx > ax { bx - ax } else { 1.0 };
    let span_y = if ymax > ymin { ymax - ymin } else { 1.0 };
    let px = |x: f64| M + (tx(x) - ax) / span_x * (W - 2.0 * M);
    let py = |y: f64| H - M - (y - ymin) / span_y * (H - 2.0 * M);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#
    );
    let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<line x1="{M}" y1="{}" x2="{}" y2="{}" stroke="black"/><line x1="{M}" y1="{M}" x2="{M}" y2="{}" stroke="black"/>"#,
        H - M,
        W - M,
        H - M,
        H - M
    );
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle" font-size="12">{x_field}{}</text>"#,
        W / 2.0,
        H - 15.0,
        if log_x { " (log scale)" } else { "" }
    );
    for (x, anchor) in [(xmin, "start"), (xmax, "end")] {
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" text-anchor="{anchor}" font-size="10">{x}</text>"#,
            px(x),
            H - M + 14.0
        );
    }
    for y in [ymin, ymax] {
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" text-anchor="end" font-size="10">{y:.4}</text>"#,
            M - 4.0,
            py(y) + 3.0
        );
    }
    for (i, (name, pts)) in series.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let coords: Vec<String> = pts
            .iter()
            .map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y)))
            .collect();
        let _ = writeln!(
            s,
            r#"<polyline class="metric" data-metric="{name}" fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
            coords.join(" ")
        );
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" font-size="11" fill="{color}">{name}</text>"#,
            W - M + 4.0 - 120.0,
            M + 14.0 * i as f64
        );
    }
    s.push_str("</svg>\n");
    Ok(s)
}

fn min_max(v: &[f64]) -> (f64, f64) {
    v.iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| {
            (a.min(x), b.max(x))
        })
}

/// Metrics plotted by default: every numeric risk column present in the table.
pub fn default_plot_metrics(records: &[RunRecord]) -> Vec<&'static str> {
    const CANDIDATES: [&str; 8] = [
        "classification_exact",
        "adversarial_exact_1n",
        "adversarial_exact_2n",
        "classification_mc",
        "adversarial_mc",
        "regression_mse",
        "coeff_error",
        "cdf_within_half",
    ];
    CANDIDATES
        .into_iter()
        .filter(|m| records.iter().any(|r| r.metric(m).is_some()))
        .collect()
}

/// Writes `records` to `path` in `format`. SVG plots against `x_field`.
pub fn emit(records: &[RunRecord], format: Format, path: &Path, x_field: &str) -> Result<()> {
    if records.is_empty() {
        return Err(invalid("refusing to emit an empty table"));
    }
    let text = match format {
        Format::Csv => to_csv(records)?,
        Format::Json => to_json(records)?,
        Format::Svg => to_svg(records, x_field, &default_plot_metrics(records))?,
    };
    std::fs::write(path, text).map_err(|e| Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

/// Reads a table previously written as CSV or JSON (by extension or content).
pub fn read_table(path: &Path) -> Result<Vec<RunRecord>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    if text.trim_start().starts_with('[') {
        from_json(&text)
    } else {
        from_csv(&text)
    }
}
