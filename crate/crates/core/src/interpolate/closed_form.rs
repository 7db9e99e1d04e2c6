use std::f64::consts::SQRT_2;

use super::{Basis, CoefficientVector};
use crate::error::{Error, Result};
use crate::featurelift::{alias_indices, BilevelEnsemble};

/// Closed-form minimum-norm coefficients for the regular grid and Fourier
/// features.
///
/// On the grid only the constant feature (value `1/sqrt2`) and the `N_A`
/// aliases (value 1) are visible, so the weighted problem reduces to a single
/// constraint `<v, xi> = 1` with `v_j = sqrt(lambda_j) c_j`. Its solution
/// `xi = v / |v|^2` maps back to `alpha_j = lambda_j c_j / |v|^2`, giving
/// `a = (lambda1 / sqrt2) / D` and `b = lambda_l / D` with
/// `D = lambda1 / 2 + N_A lambda_l`.
pub fn closed_form_coeffs(ensemble: &BilevelEnsemble) -> Result<CoefficientVector> {
    let n = ensemble.n;
    let n_a = ensemble.alias_count().ok_or_else(|| {
        Error::AliasStructureViolated(format!(
            "B - 1 = {} is not a multiple of 2n = {}",
            ensemble.feature_count - 1,
            2 * n
        ))
    })?;
    if n % 2 == 1 {
        return Err(Error::AliasStructureViolated(format!(
            "odd n = {n}: cos(k n pi x) alternates sign on the grid"
        )));
    }
    let denom = ensemble.lambda1 / 2.0 + n_a as f64 * ensemble.lambda_l;
    let a = ensemble.lambda1 / SQRT_2 / denom;
    let b = ensemble.lambda_l / denom;
    let mut alpha = vec![0.0; ensemble.feature_count];
    alpha[0] = a;
    for j in alias_indices(n, ensemble.feature_count) {
        alpha[j] = b;
    }
    Ok(CoefficientVector {
        alpha,
        a,
        b: Some(b),
        alias_spread_flag: false,
        basis: Basis::Fourier,
    })
}
