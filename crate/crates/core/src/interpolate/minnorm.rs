use nalgebra::{DMatrix, DVector, SymmetricEigen};

use super::{Basis, CoefficientVector};
use crate::error::{invalid, Error, Result};
use crate::featurelift::{design_matrix, legendre_design_matrix, BilevelEnsemble, TrainingSet};

/// Default largest Gram condition number accepted.
pub const DEFAULT_MAX_CONDITION: f64 = 1e12;

/// Relative residual accepted when fewer features than constraints are active.
const INTERPOLATION_TOL: f64 = 1e-8;

/// `alpha = S M^T (M S M^T)^{-1} y` with `S = diag(weights)`.
pub fn solve_min_norm(
    design: &DMatrix<f64>,
    weights: &[f64],
    labels: &[f64],
) -> Result<CoefficientVector> {
    solve_min_norm_with(design, weights, labels, DEFAULT_MAX_CONDITION)
}

/// [`solve_min_norm`] with an explicit condition-number threshold.
pub fn solve_min_norm_with(
    design: &DMatrix<f64>,
    weights: &[f64],
    labels: &[f64],
    max_condition: f64,
) -> Result<CoefficientVector> {
    let (n, b) = design.shape();
    if weights.len() != b {
        return Err(invalid(format!(
            "weighting has {} entries for {b} features",
            weights.len()
        )));
    }
    if labels.len() != n {
        return Err(invalid(format!("{} labels for {n} rows", labels.len())));
    }
    if let Some(w) = weights.iter().find(|w| !(**w >= 0.0)) {
        return Err(invalid(format!("weights must be non-negative, got {w}")));
    }
    let y = DVector::from_column_slice(labels);
    let active: Vec<usize> = (0..b).filter(|&j| weights[j] > 0.0).collect();
    if active.len() < n {
        return solve_on_active(design, &active, &y, max_condition);
    }
    let mut scaled = design.clone();
    for (j, &w) in weights.iter().enumerate() {
        scaled.column_mut(j).scale_mut(w);
    }
    let gram = &scaled * design.transpose();
    let dual = spd_solve(gram, &y, max_condition)?;
    let mut alpha: Vec<f64> = (scaled.transpose() * dual).iter().copied().collect();
    for (a, &w) in alpha.iter_mut().zip(weights) {
        if w == 0.0 {
            *a = 0.0;
        }
    }
    Ok(CoefficientVector::new(alpha, Basis::Generic))
}

/// Fewer active features than constraints: the interpolator, if it exists, is
/// the unique least-squares solution on the active columns.
fn solve_on_active(
    design: &DMatrix<f64>,
    active: &[usize],
    y: &DVector<f64>,
    max_condition: f64,
) -> Result<CoefficientVector> {
    let singular = Error::GramSingular {
        condition: f64::INFINITY,
        threshold: max_condition,
    };
    if active.is_empty() {
        return Err(singular);
    }
    let sub = design.select_columns(active);
    let coef = spd_solve(
        sub.transpose() * &sub,
        &(sub.transpose() * y),
        max_condition,
    )?;
    let residual = (&sub * &coef - y).norm();
    if residual > INTERPOLATION_TOL * y.norm().max(1.0) {
        return Err(singular);
    }
    let mut alpha = vec![0.0; design.ncols()];
    for (&j, c) in active.iter().zip(coef.iter()) {
        alpha[j] = *c;
    }
    Ok(CoefficientVector::new(alpha, Basis::Generic))
}

/// Solves `G x = rhs` for symmetric positive definite `G` by Cholesky, after
/// checking the spectral condition number.
pub fn spd_solve(
    gram: DMatrix<f64>,
    rhs: &DVector<f64>,
    max_condition: f64,
) -> Result<DVector<f64>> {
    let eig = SymmetricEigen::new(gram.clone());
    let (lo, hi) = eig
        .eigenvalues
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(l, h), &v| {
            (l.min(v), h.max(v.abs()))
        });
    let condition = if lo > 0.0 { hi / lo } else { f64::INFINITY };
    if !(condition <= max_condition) {
        return Err(Error::GramSingular {
            condition,
            threshold: max_condition,
        });
    }
    let chol = gram.cholesky().ok_or(Error::GramSingular {
        condition,
        threshold: max_condition,
    })?;
    Ok(chol.solve(rhs))
}

/// Minimum-norm interpolator for the bilevel ensemble on Fourier features.
pub fn min_norm_fourier(
    ensemble: &BilevelEnsemble,
    train: &TrainingSet,
) -> Result<CoefficientVector> {
    let m = design_matrix(&train.points, ensemble.feature_count)?;
    let mut cv = solve_min_norm(&m, &ensemble.weights(), &train.labels)?;
    cv.basis = Basis::Fourier;
    Ok(cv.summarize_aliases(ensemble.n))
}

/// Minimum-norm interpolator for the bilevel ensemble on Legendre features.
pub fn min_norm_legendre(
    ensemble: &BilevelEnsemble,
    train: &TrainingSet,
) -> Result<CoefficientVector> {
    let m = legendre_design_matrix(&train.points, ensemble.feature_count)?;
    let mut cv = solve_min_norm(&m, &ensemble.weights(), &train.labels)?;
    cv.basis = Basis::Legendre;
    Ok(cv)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::featurelift::{build_ensemble, make_training_set, LayoutKind};

    #[test]
    fn single_constraint() {
        let m = DMatrix::from_element(1, 1, std::f64::consts::FRAC_1_SQRT_2);
        let cv = solve_min_norm(&m, &[1.0], &[1.0]).unwrap();
        assert!((cv.alpha[0] - 2f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn linear_in_labels_and_interpolates() {
        let e = build_ensemble(8, 2.0, 1.45).unwrap();
        let t = make_training_set(8, LayoutKind::Random, Some(11)).unwrap();
        let m = design_matrix(&t.points, e.feature_count).unwrap();
        let w = e.weights();
        let base = solve_min_norm(&m, &w, &t.labels).unwrap();
        let scaled = solve_min_norm(&m, &w, &[-2.5; 8]).unwrap();
        for (x, y) in base.alpha.iter().zip(&scaled.alpha) {
            assert!((x * -2.5 - y).abs() < 1e-10 * x.abs().max(1.0));
        }
        let fitted = &m * DVector::from_vec(base.alpha.clone());
        for v in fitted.iter() {
            assert!((v - 1.0).abs() < 1e-8);
        }
    }

    #[test]
    fn duplicated_points_are_singular() {
        let e = build_ensemble(4, 2.0, 1.0).unwrap();
        let m = design_matrix(&[0.1, 0.1, 0.5, 0.7], e.feature_count).unwrap();
        let err = solve_min_norm(&m, &e.weights(), &[1.0; 4]).unwrap_err();
        assert!(matches!(err, Error::GramSingular { .. }));
    }

    #[test]
    fn zero_weights_give_exact_zeros() {
        let e = build_ensemble(8, 2.0, 0.0).unwrap();
        let t = make_training_set(8, LayoutKind::Grid, None).unwrap();
        let cv = min_norm_fourier(&e, &t).unwrap();
        assert!(cv.alpha[1..].iter().all(|&v| v == 0.0));
        assert!((cv.a - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn threshold_is_configurable() {
        let e = build_ensemble(8, 2.0, 1.45).unwrap();
        let t = make_training_set(8, LayoutKind::Grid, None).unwrap();
        let m = design_matrix(&t.points, e.feature_count).unwrap();
        let err = solve_min_norm_with(&m, &e.weights(), &t.labels, 1.0).unwrap_err();
        assert!(matches!(err, Error::GramSingular { .. }));
    }
}
