use serde::{Deserialize, Serialize};

/// One row of a sweep table. Fields are declared in lexicographic order, which
/// is also the CSV column order. Every input needed to re-run the cell is
/// stored alongside its outputs.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    /// Constant-feature coefficient.
    pub a: Option<f64>,
    /// Critical survival value of `a` below which the dip crosses zero.
    pub a_critical: Option<f64>,
    pub adversarial_exact_1n: Option<f64>,
    pub adversarial_exact_2n: Option<f64>,
    /// Exact adversarial risk at `epsilon = 2 pi / h`.
    pub adversarial_exact_small: Option<f64>,
    pub adversarial_mc: Option<f64>,
    pub adversarial_mc_stderr: Option<f64>,
    pub alias_p30: Option<f64>,
    pub alias_p70: Option<f64>,
    pub avg_alias_weight: Option<f64>,
    /// Common alias coefficient.
    pub b: Option<f64>,
    pub b_override: Option<u64>,
    pub bound_adv_small: Option<f64>,
    pub bound_classification: Option<f64>,
    /// Distance-CDF fractions at thresholds 0.1..2.0 (units of 1/n), `;`-joined.
    pub cdf: Option<String>,
    pub cdf_within_half: Option<f64>,
    pub classification_exact: Option<f64>,
    pub classification_mc: Option<f64>,
    pub classification_mc_stderr: Option<f64>,
    /// `|alpha_eff - alpha_closed|_2` for random-feature cells.
    pub coeff_error: Option<f64>,
    /// Random-feature width.
    pub d: Option<u64>,
    /// Epsilon rule of the Monte Carlo adversary (`1/n`, `2/n`, `2pi/h` or a number).
    pub eps_rule: String,
    pub family: String,
    pub feature_count: Option<u64>,
    pub inner_grid: Option<u64>,
    /// Index of the last crossing lobe.
    pub k_star: Option<u64>,
    pub k_star_upper: Option<f64>,
    /// Kolmogorov-Smirnov distance to the Fourier distance CDF.
    pub ks_to_fourier: Option<f64>,
    pub layout: String,
    pub n: u64,
    /// Predicted phase-transition sample size.
    pub n0: Option<f64>,
    /// `(B - 1) / (2n)`.
    pub n_aliases: Option<f64>,
    pub n_test: Option<u64>,
    pub non_alias_energy: Option<f64>,
    /// Requested metric groups, `;`-joined.
    pub outputs: String,
    pub p: f64,
    pub positive_condition: Option<bool>,
    pub q: f64,
    pub regime: Option<String>,
    /// `E (f(x) - 1)^2` under Unif[-1, 1].
    pub regression_mse: Option<f64>,
    pub seed: Option<u64>,
    /// `ok` or `failed: <reason>`.
    pub status: String,
    pub sweep: String,
    pub version: String,
    pub wall_time_s: Option<f64>,
}

impl RunRecord {
    pub fn is_ok(&self) -> bool {
        self.status == "ok"
    }

    /// Numeric value of a metric column by name.
    pub fn metric(&self, name: &str) -> Option<f64> {
        let value = serde_json::to_value(self).ok()?;
        match value.get(name)? {
            serde_json::Value::Number(x) => x.as_f64(),
            serde_json::Value::Bool(b) => Some(f64::from(u8::from(*b))),
            _ => None,
        }
    }

    /// Column names in CSV order.
    pub fn field_names() -> Vec<String> {
        match serde_json::to_value(RunRecord::default()) {
            Ok(serde_json::Value::Object(map)) => map.keys().cloned().collect(),
            _ => Vec::new(),
        }
    }
}

/// Maps non-finite values to `None` so records stay serialisable.
pub(crate) fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_names_are_sorted() {
        let names = RunRecord::field_names();
        let mut sorted = names.clone();
        sorted.sort();
        assert_eq!(names, sorted);
        assert!(names.contains(&"wall_time_s".to_string()));
    }
}
