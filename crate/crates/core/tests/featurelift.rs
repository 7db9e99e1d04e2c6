use std::f64::consts::FRAC_1_SQRT_2;

use aliaslab::featurelift::{
    alias_indices, build_ensemble, design_matrix, fourier_map, make_training_set,
    sample_rfs_weights, BilevelEnsemble, LayoutKind,
};
use nalgebra::{DMatrix, SymmetricEigen};
use proptest::prelude::*;

proptest! {
    #[test]
    fn trace_normalisation(n in 2usize..64, p in 1.1f64..2.4, q in 0.0f64..3.0) {
        let e = build_ensemble(n, p, q).unwrap();
        let b = e.feature_count as f64;
        let trace = e.lambda1 + (b - 1.0) * e.lambda_l;
        prop_assert!((trace - b).abs() <= 1e-12 * b);
        prop_assert_eq!((e.feature_count - 1) % (2 * n), 0);
        prop_assert!(b >= (n as f64).powf(p) - 1e-9);
        prop_assert!(b - 2.0 * (n as f64) < (n as f64).powf(p));
    }

    #[test]
    fn fourier_entries_bounded(x in -1.0f64..=1.0, m in 0usize..100) {
        let phi = fourier_map(x, 2 * m + 1).unwrap();
        prop_assert_eq!(phi[0], FRAC_1_SQRT_2);
        prop_assert!(phi[1..].iter().all(|v| v.abs() <= 1.0));
    }
}

#[test]
fn fourier_examples() {
    let at0 = fourier_map(0.0, 5).unwrap();
    let want0 = [FRAC_1_SQRT_2, 0.0, 1.0, 0.0, 1.0];
    let at1 = fourier_map(1.0, 5).unwrap();
    let want1 = [FRAC_1_SQRT_2, 0.0, -1.0, 0.0, 1.0];
    for (g, w) in at0.iter().zip(want0).chain(at1.iter().zip(want1)) {
        assert!((g - w).abs() < 1e-15, "{g} vs {w}");
    }
    assert!(fourier_map(0.0, 4).is_err());
}

#[test]
fn grid_column_sums() {
    for n in [4usize, 8, 16] {
        let train = make_training_set(n, LayoutKind::Grid, None).unwrap();
        for k in 1..=4 {
            let b = 2 * k * n + 1;
            let m = design_matrix(&train.points, b).unwrap();
            let aliases = alias_indices(n, b);
            assert_eq!(aliases.len(), k);
            for j in 1..b {
                let col = m.column(j);
                if aliases.contains(&j) {
                    assert!(
                        col.iter().all(|v| (v - 1.0).abs() < 1e-9),
                        "alias column {j} for n={n}"
                    );
                } else {
                    assert!(
                        col.sum().abs() < 1e-9,
                        "column {j} for n={n} sums to {}",
                        col.sum()
                    );
                }
            }
        }
    }
}

#[test]
fn ensemble_definition_examples() {
    let e = build_ensemble(8, 2.0, 0.0).unwrap();
    assert_eq!(e.gamma, 1.0);
    assert_eq!(e.lambda_l, 0.0);
    assert_eq!(e.lambda1, e.feature_count as f64);

    let e = build_ensemble(8, 2.0, 2.0).unwrap();
    let b = e.feature_count as f64;
    assert_eq!(e.feature_count, 65);
    assert!((e.gamma - 1.0 / 64.0).abs() < 1e-15);
    assert!((e.lambda1 - e.gamma * b).abs() < 1e-12);
    assert!((e.lambda_l - (1.0 - e.gamma) * b / (b - 1.0)).abs() < 1e-12);
    // lambda1 / lambda_l = gamma (B - 1) / (1 - gamma)
    assert!((e.lambda1 / e.lambda_l - e.gamma * (b - 1.0) / (1.0 - e.gamma)).abs() < 1e-10);

    assert_eq!(build_ensemble(30, 2.0, 1.45).unwrap().feature_count, 901);
    assert!(build_ensemble(1, 2.0, 1.0).is_err());
    assert!(build_ensemble(8, 1.0, 1.0).is_err());
    let over = BilevelEnsemble::with_feature_count(30, 2.0, 1.45, 4930).unwrap();
    assert!(over.alias_count().is_none());
}

#[test]
fn training_sets() {
    let g = make_training_set(4, LayoutKind::Grid, None).unwrap();
    assert_eq!(g.points, vec![-0.5, 0.0, 0.5, 1.0]);
    assert!(g.labels.iter().all(|&y| y == 1.0));
    let r = make_training_set(100, LayoutKind::Random, Some(3)).unwrap();
    assert!(r.points.iter().all(|x| (-1.0..=1.0).contains(x)));
    assert!(r.labels.iter().all(|&y| y == 1.0) && r.labels.len() == 100);
    let s = make_training_set(100, LayoutKind::Random, Some(4)).unwrap();
    assert_ne!(r.points, s.points);
    assert_eq!(
        r.points,
        make_training_set(100, LayoutKind::Random, Some(3))
            .unwrap()
            .points
    );
    assert!(make_training_set(10, LayoutKind::Random, None).is_err());
}

#[test]
fn rfs_weights_are_deterministic() {
    let e = build_ensemble(8, 2.0, 1.45).unwrap();
    let a = sample_rfs_weights(&e, 64, 9).unwrap();
    assert_eq!(a, sample_rfs_weights(&e, 64, 9).unwrap());
    assert_ne!(a, sample_rfs_weights(&e, 64, 10).unwrap());
    let wide = sample_rfs_weights(&e, 128, 9).unwrap();
    assert_eq!(a, wide.columns(0, 64).into_owned());
}

#[test]
fn rfs_row_variance_matches_weight() {
    let e = build_ensemble(8, 2.0, 1.45).unwrap();
    let d = 100_000;
    let w = sample_rfs_weights(&e, d, 1).unwrap();
    for (row, lambda) in [(0, e.lambda1), (1, e.lambda_l), (64, e.lambda_l)] {
        let var = w.row(row).iter().map(|v| v * v).sum::<f64>() / d as f64;
        let se = lambda * (2.0 / d as f64).sqrt();
        assert!(
            (var - lambda).abs() <= 3.0 * se,
            "row {row}: {var} vs {lambda} (se {se})"
        );
    }
}

#[test]
fn rfs_covariance_concentration() {
    let e = build_ensemble(8, 2.0, 1.45).unwrap();
    let (b, d, delta) = (e.feature_count as f64, 4096.0, 0.1);
    let sigma = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(e.weights()));
    let sigma_norm = e.lambda1.max(e.lambda_l);
    let r = (b / d).sqrt();
    let bound = 2.0 * r + 2.0 * delta + (r + delta).powi(2);
    let hits = (0..100u64)
        .filter(|&seed| {
            let w = sample_rfs_weights(&e, 4096, seed).unwrap();
            let dev = &w * w.transpose() / d - &sigma;
            let spectral = SymmetricEigen::new(dev).eigenvalues.amax();
            spectral / sigma_norm <= bound
        })
        .count();
    assert!(hits >= 95, "{hits}/100 trials within {bound}");
}
