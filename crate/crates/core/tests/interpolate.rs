use std::f64::consts::SQRT_2;

use aliaslab::featurelift::{
    build_ensemble, design_matrix, fourier_map, legendre_design_matrix, make_training_set,
    BilevelEnsemble, LayoutKind,
};
use aliaslab::interpolate::{
    closed_form_coeffs, min_norm_fourier, min_norm_legendre, solve_bilevel_kernel, solve_min_norm,
    solve_rfs,
};
use aliaslab::mcestim::{alias_statistics, percentile};
use aliaslab::Error;
use nalgebra::DMatrix;
use proptest::prelude::*;

fn grid(n: usize) -> aliaslab::featurelift::TrainingSet {
    make_training_set(n, LayoutKind::Grid, None).unwrap()
}

fn l2(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).powi(2))
        .sum::<f64>()
        .sqrt()
}

fn log_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let k = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / k, ly.iter().sum::<f64>() / k);
    let num: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    num / lx.iter().map(|x| (x - mx).powi(2)).sum::<f64>()
}

#[test]
fn single_constraint() {
    let design = DMatrix::from_element(1, 1, 1.0 / SQRT_2);
    let cv = solve_min_norm(&design, &[1.0], &[1.0]).unwrap();
    assert!((cv.alpha[0] - SQRT_2).abs() < 1e-15);
}

#[test]
fn general_solver_matches_closed_form() {
    for (n, q) in [(8, 1.45), (16, 0.5), (8, 2.0), (30, 1.25), (64, 1.75)] {
        let e = build_ensemble(n, 2.0, q).unwrap();
        let general = min_norm_fourier(&e, &grid(n)).unwrap();
        let closed = closed_form_coeffs(&e).unwrap();
        for (g, c) in general.alpha.iter().zip(&closed.alpha) {
            assert!((g - c).abs() <= 1e-8, "n={n} q={q}: {g} vs {c}");
        }
    }
}

#[test]
fn closed_form_structure() {
    let e = build_ensemble(8, 2.0, 1.45).unwrap();
    let cv = closed_form_coeffs(&e).unwrap();
    let n_a = e.alias_count().unwrap() as f64;
    let (a, b) = (cv.a, cv.b.unwrap());
    assert!((a / SQRT_2 + n_a * b - 1.0).abs() < 1e-14);
    for (j, v) in cv.alpha.iter().enumerate() {
        if j == 0 {
            continue;
        }
        if j % 16 == 0 {
            assert_eq!(*v, b);
        } else {
            assert_eq!(*v, 0.0);
        }
    }
    let zero_q = closed_form_coeffs(&build_ensemble(8, 2.0, 0.0).unwrap()).unwrap();
    assert!((zero_q.a - SQRT_2).abs() < 1e-15 && zero_q.b == Some(0.0));
    let odd = closed_form_coeffs(&build_ensemble(7, 2.0, 1.45).unwrap());
    assert!(matches!(odd, Err(Error::AliasStructureViolated(_))));
    let skewed =
        closed_form_coeffs(&BilevelEnsemble::with_feature_count(30, 2.0, 1.45, 4930).unwrap());
    assert!(matches!(skewed, Err(Error::AliasStructureViolated(_))));
}

#[test]
fn zero_weights_get_zero_coefficients() {
    let e = build_ensemble(8, 2.0, 0.0).unwrap();
    let cv = min_norm_fourier(&e, &grid(8)).unwrap();
    assert!((cv.alpha[0] - SQRT_2).abs() < 1e-12);
    assert!(cv.alpha[1..].iter().all(|&v| v == 0.0));
}

#[test]
fn coefficient_exponents() {
    let ns = [16.0, 32.0, 64.0, 128.0];
    let q = 1.45;
    let (mut a, mut b) = (Vec::new(), Vec::new());
    for &n in &ns {
        let cv = closed_form_coeffs(&build_ensemble(n as usize, 2.0, q).unwrap()).unwrap();
        a.push(cv.a);
        b.push(cv.b.unwrap());
    }
    let (sa, sb) = (log_slope(&ns, &a), log_slope(&ns, &b));
    assert!((sa + (q - 1.0)).abs() <= 0.1, "a slope {sa}");
    assert!((sb + 1.0).abs() <= 0.1, "b slope {sb}");
}

#[test]
fn kernel_form_matches_feature_form() {
    let e = build_ensemble(12, 2.0, 1.45).unwrap();
    let train = make_training_set(12, LayoutKind::Random, Some(5)).unwrap();
    let kernel = solve_bilevel_kernel(&e, &train).unwrap();
    let direct = min_norm_fourier(&e, &train).unwrap();
    for (k, d) in kernel.coefficients().alpha.iter().zip(&direct.alpha) {
        assert!((k - d).abs() < 1e-8);
    }
    for &x in &train.points {
        assert!((kernel.eval(x) - 1.0).abs() < 1e-8);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn interpolates_random_training(n in 3usize..20, seed in 0u64..1000, q in 0.2f64..2.5) {
        let e = build_ensemble(n, 2.0, q).unwrap();
        let train = make_training_set(n, LayoutKind::Random, Some(seed)).unwrap();
        let solved = min_norm_fourier(&e, &train);
        prop_assume!(solved.is_ok());
        let cv = solved.unwrap();
        for &x in &train.points {
            let v = cv.dot(&fourier_map(x, e.feature_count).unwrap());
            prop_assert!((v - 1.0).abs() <= 1e-8, "f({x}) = {v}");
        }
    }

    #[test]
    fn permutation_invariance(seed in 0u64..1000, shift in 1usize..40) {
        let e = build_ensemble(6, 2.0, 1.3).unwrap();
        let b = e.feature_count;
        let train = make_training_set(6, LayoutKind::Random, Some(seed)).unwrap();
        let design = design_matrix(&train.points, b).unwrap();
        let weights = e.weights();
        let perm: Vec<usize> = (0..b).map(|j| (j * 7 + shift) % b).collect();
        let permuted = DMatrix::from_fn(design.nrows(), b, |i, j| design[(i, perm[j])]);
        let pw: Vec<f64> = perm.iter().map(|&j| weights[j]).collect();
        let base = solve_min_norm(&design, &weights, &train.labels);
        prop_assume!(base.is_ok());
        let base = base.unwrap();
        let other = solve_min_norm(&permuted, &pw, &train.labels).unwrap();
        for (j, &pj) in perm.iter().enumerate() {
            prop_assert!((other.alpha[j] - base.alpha[pj]).abs() <= 1e-10);
        }
    }

    #[test]
    fn linear_in_labels(c in -5.0f64..5.0, n in 2usize..12) {
        let n = 2 * n;
        let e = build_ensemble(n, 2.0, 1.45).unwrap();
        let design = design_matrix(&grid(n).points, e.feature_count).unwrap();
        let base = solve_min_norm(&design, &e.weights(), &vec![1.0; n]).unwrap();
        let scaled = solve_min_norm(&design, &e.weights(), &vec![c; n]).unwrap();
        for (s, b) in scaled.alpha.iter().zip(&base.alpha) {
            prop_assert!((s - c * b).abs() <= 1e-10 * (1.0 + b.abs()));
        }
    }
}

#[test]
fn duplicated_points_are_singular() {
    let e = build_ensemble(4, 2.0, 1.0).unwrap();
    let design = design_matrix(&[0.1, 0.1, 0.5, 0.9], e.feature_count).unwrap();
    let r = solve_min_norm(&design, &e.weights(), &[1.0; 4]);
    assert!(matches!(r, Err(Error::GramSingular { .. })));
}

#[test]
fn legendre_interpolates() {
    let e = build_ensemble(10, 2.0, 1.45).unwrap();
    let train = grid(10);
    let cv = min_norm_legendre(&e, &train).unwrap();
    let m = legendre_design_matrix(&train.points, e.feature_count).unwrap();
    for row in 0..10 {
        let v: f64 = m.row(row).iter().zip(&cv.alpha).map(|(p, a)| p * a).sum();
        assert!((v - 1.0).abs() < 1e-8);
    }
}

#[test]
fn rfs_solution_invariants() {
    let e = build_ensemble(8, 2.0, 1.45).unwrap();
    let train = grid(8);
    for d in [8, 64, 1024] {
        let s = solve_rfs(&e, &train, d, 3).unwrap();
        assert!(s.interpolates);
        for &x in &train.points {
            assert!((s.eval_feature_space(x) - 1.0).abs() <= 1e-6);
        }
        let worst = (0..1000)
            .map(|i| -1.0 + 2.0 * i as f64 / 999.0)
            .map(|x| (s.eval_feature_space(x) - s.eval(x)).abs())
            .fold(0.0, f64::max);
        assert!(worst < 1e-6, "d={d}: {worst}");
    }
    assert!(!solve_rfs(&e, &train, 4, 3).unwrap().interpolates);
}

#[test]
fn rfs_approaches_closed_form() {
    let e = build_ensemble(8, 2.0, 1.45).unwrap();
    let train = grid(8);
    let closed = closed_form_coeffs(&e).unwrap();
    let b = closed.b.unwrap();
    let (mut err, mut energy, mut avg) = (vec![Vec::new(); 4], vec![Vec::new(); 4], Vec::new());
    let widths = [128, 512, 2048, 8192];
    for seed in 0..20 {
        for (i, &d) in widths.iter().enumerate() {
            let s = solve_rfs(&e, &train, d, seed).unwrap();
            err[i].push(l2(&s.alpha_eff, &closed.alpha));
            energy[i].push(alias_statistics(&s.alpha_eff, 8, e.feature_count).non_alias_energy);
        }
        let s = solve_rfs(&e, &train, 4096, seed).unwrap();
        avg.push(alias_statistics(&s.alpha_eff, 8, e.feature_count).avg_alias_weight);
    }
    let med = |v: &Vec<f64>| percentile(v, 50.0);
    for i in 1..4 {
        assert!(
            med(&err[i]) < med(&err[i - 1]),
            "coefficient error not decreasing at d={}",
            widths[i]
        );
        assert!(
            med(&energy[i]) < med(&energy[i - 1]),
            "non-alias energy not decreasing at d={}",
            widths[i]
        );
    }
    let m = med(&avg);
    assert!((m - b).abs() <= 0.2 * b, "average alias weight {m} vs {b}");
    let closed_stats = alias_statistics(&closed.alpha, 8, e.feature_count);
    assert_eq!(closed_stats.non_alias_energy, 0.0);
    assert_eq!(closed_stats.alias_p30, closed_stats.alias_p70);
}
