use std::f64::consts::{PI, SQRT_2};

use aliaslab::featurelift::{build_ensemble, BilevelEnsemble};
use aliaslab::interpolate::closed_form_coeffs;
use aliaslab::riskexact::{
    adversarial_risk, classification_risk, critical_survival, crossing_lobes, dirichlet_envelope,
    dirichlet_kernel, exact_risk_report, exact_zero_crossings, find_zero_crossings, golden_max,
    k_star_bounds, padded_intervals, quadratic_lobe, risk_bounds, DirichletForm, LearnedFunction,
    ZeroCrossingSet, HAND_SURVIVAL_THRESHOLD,
};
use proptest::prelude::*;

fn form(n: usize, q: f64) -> DirichletForm {
    DirichletForm::from_ensemble(&build_ensemble(n, 2.0, q).unwrap()).unwrap()
}

fn set_of(roots: Vec<(f64, f64)>) -> ZeroCrossingSet {
    ZeroCrossingSet {
        roots,
        interval: (-1.0, 1.0),
        periodic: false,
        refinement_tol: 1e-12,
    }
}

/// Sorted disjoint intervals in [-1, 1] from sorted cut points.
fn intervals_strategy() -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec(-1.0f64..1.0, 0..20).prop_map(|mut cuts| {
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        cuts.chunks_exact(2).map(|c| (c[0], c[1])).collect()
    })
}

proptest! {
    #[test]
    fn adversarial_risk_is_monotone(roots in intervals_strategy(), eps in prop::collection::vec(0.0f64..0.5, 1..10)) {
        let set = set_of(roots);
        let mut eps = eps;
        eps.sort_by(f64::total_cmp);
        let c = classification_risk(&set);
        prop_assert_eq!(adversarial_risk(&set, 0.0), c);
        let mut prev = c;
        for e in eps {
            let r = adversarial_risk(&set, e);
            prop_assert!(r + 1e-15 >= prev);
            prop_assert!(r <= 1.0 + 1e-15);
            prev = r;
        }
    }

    #[test]
    fn periodic_risk_is_monotone(n in 2usize..32, q in 0.5f64..2.5, steps in 2usize..20) {
        let f = form(2 * n, q);
        let set = exact_zero_crossings(&LearnedFunction::Dirichlet(f)).unwrap();
        let mut prev = classification_risk(&set);
        for i in 0..=steps {
            let r = adversarial_risk(&set, f.period() * i as f64 / steps as f64);
            prop_assert!(r + 1e-15 >= prev);
            prev = r;
        }
    }
}

#[test]
fn risk_examples() {
    assert!((classification_risk(&set_of(vec![(-0.1, 0.1)])) - 0.1).abs() < 1e-15);
    assert_eq!(classification_risk(&set_of(vec![])), 0.0);
    assert_eq!(adversarial_risk(&set_of(vec![]), 0.3), 0.0);
    let r = adversarial_risk(&set_of(vec![(0.2, 0.3)]), 0.05);
    assert!((r - 0.5 * (0.1 + 0.1)).abs() < 1e-15);
    assert_eq!(adversarial_risk(&set_of(vec![(0.2, 0.3)]), 5.0), 1.0);
}

#[test]
fn constant_function_has_no_crossings() {
    let e = build_ensemble(16, 2.0, 0.0).unwrap();
    let f = LearnedFunction::Dirichlet(DirichletForm::from_ensemble(&e).unwrap());
    assert!(exact_zero_crossings(&f).unwrap().is_empty());
}

#[test]
fn dirichlet_form_matches_direct_sum() {
    let e = build_ensemble(8, 2.0, 1.45).unwrap();
    let f = DirichletForm::from_ensemble(&e).unwrap();
    let alpha = closed_form_coeffs(&e).unwrap().alpha;
    let direct = LearnedFunction::Fourier { alpha };
    for i in 0..1000 {
        let x = -1.0 + 2.0 * (i as f64 + 0.37) / 1000.0;
        assert!((f.eval(x) - direct.eval(x)).abs() < 1e-8);
    }
    for i in 0..=8 {
        let x = -1.0 + 2.0 * i as f64 / 8.0;
        assert!((f.eval(x) - 1.0).abs() < 1e-12);
    }
    assert!((dirichlet_kernel(0.0, 82.0) - 165.0).abs() < 1e-9);
    assert!((dirichlet_kernel(1e-14, 82.0) - 165.0).abs() < 1e-9);
}

#[test]
fn period_consistency() {
    for (n, q) in [(8, 1.45), (16, 1.75), (8, 2.0), (16, 0.5)] {
        let e = build_ensemble(n, 2.0, q).unwrap();
        let f = DirichletForm::from_ensemble(&e).unwrap();
        let periodic = exact_zero_crossings(&LearnedFunction::Dirichlet(f)).unwrap();
        let direct = LearnedFunction::Fourier {
            alpha: closed_form_coeffs(&e).unwrap().alpha,
        };
        let full = find_zero_crossings(&direct, (-1.0, 1.0), 200_001, 1e-13).unwrap();
        assert_eq!(full.roots.len(), n * periodic.roots.len(), "n={n} q={q}");
        for eps in [
            0.0,
            1.0 / n as f64,
            2.0 * PI / f.half_order(),
            0.3 / n as f64,
        ] {
            let (a, b) = (
                adversarial_risk(&periodic, eps),
                adversarial_risk(&full, eps),
            );
            assert!((a - b).abs() < 1e-6, "n={n} q={q} eps={eps}: {a} vs {b}");
        }
    }
}

#[test]
fn kernel_roots_are_analytic() {
    // Zero signal floor leaves (b/2) D_{N_A}(n pi x), whose zeros are 2c/(B - 1 + n).
    let (n, big_b) = (8usize, 1537usize);
    let b = 0.01;
    let f = DirichletForm::new(b / SQRT_2, b, n, big_b).unwrap();
    assert!(f.signal_floor().abs() < 1e-16);
    let set = exact_zero_crossings(&LearnedFunction::Dirichlet(f)).unwrap();
    assert!(!set.is_empty());
    let spacing = 2.0 / (big_b - 1 + n) as f64;
    for &(l, r) in &set.roots {
        for x in [l, r] {
            if (x - set.interval.0).abs() < 1e-15 || (x - set.interval.1).abs() < 1e-15 {
                continue;
            }
            let c = (x / spacing).round();
            assert!(
                (x - c * spacing).abs() < 1e-9,
                "root {x} off the analytic zero set"
            );
            assert!(
                (c as i64) % ((big_b - 1 + n) as i64 / n as i64) != 0,
                "root at a pole {x}"
            );
        }
    }
}

#[test]
fn envelope_holds_and_is_within_factor_two() {
    let e = BilevelEnsemble::with_feature_count(30, 2.0, 1.45, 4921).unwrap();
    assert_eq!(e.alias_count(), Some(82));
    let f = DirichletForm::from_ensemble(&e).unwrap();
    for i in 1..=10_000 {
        let x = i as f64 / (30.0 * 10_000.0);
        let v = (f.eval(x) - f.signal_floor()).abs();
        assert!(v <= dirichlet_envelope(x, 30, f.b).unwrap());
    }
    // At the lobe extrema near the origin the kernel reaches half the envelope.
    let h = f.half_order();
    for k in 2..6 {
        let (lo, hi) = ((2 * k - 1) as f64 / h, (2 * k) as f64 / h);
        let (x, v) = golden_max(|x| (f.eval(x) - f.signal_floor()).abs(), lo, hi, 100);
        let ratio = v / dirichlet_envelope(x, 30, f.b).unwrap();
        assert!((ratio - 0.5).abs() <= 0.025, "lobe {k}: {ratio}");
    }
    let a = dirichlet_envelope(0.01, 30, 1.0).unwrap();
    let b = dirichlet_envelope(0.02, 30, 1.0).unwrap();
    assert!((a - 2.0 * b).abs() < 1e-14);
    assert!(dirichlet_envelope(0.0, 30, 1.0).is_err());
}

#[test]
fn positive_condition_implies_crossing() {
    let mut positive = 0;
    for q in [1.25, 1.45, 1.75, 2.0, 2.5] {
        for n in [8, 16, 30, 64, 128] {
            let f = form(n, q);
            let ks = k_star_bounds(f.a, f.b, f.feature_count(), n);
            let set = exact_zero_crossings(&LearnedFunction::Dirichlet(f)).unwrap();
            if ks.positive_condition {
                positive += 1;
                assert!(!crossing_lobes(&set, &f).is_empty(), "q={q} n={n}");
            }
            if !ks.vacuous {
                let last = crossing_lobes(&set, &f).last().copied().unwrap_or(0);
                assert!(
                    last as f64 <= ks.upper.ceil(),
                    "q={q} n={n}: {last} > {}",
                    ks.upper
                );
            }
        }
    }
    assert!(positive > 5);
}

#[test]
fn phase_transition_is_exact() {
    for n in [8, 16, 30, 64, 128, 256] {
        for q in [0.5, 0.9, 1.0, 1.25, 1.45, 1.75, 2.0, 2.5] {
            let f = form(n, q);
            let r = exact_risk_report(&f, &[2.0 / n as f64], Some(q)).unwrap();
            let adv = r.adversarial[0].1;
            assert!(adv == 0.0 || adv == 1.0, "n={n} q={q}: {adv}");
            assert_eq!(adv, r.bound_adv_medium as f64, "n={n} q={q}");
            if q < 1.0 && n >= 64 {
                assert_eq!(r.bound_adv_medium, 0);
            }
        }
    }
}

#[test]
fn classification_within_bound_example() {
    let f = form(16, 1.5);
    let r = exact_risk_report(&f, &[], Some(1.5)).unwrap();
    let rb = risk_bounds(f.a, f.b, f.feature_count(), 16);
    assert!(r.classification <= rb.classification);
}

#[test]
fn critical_survival_brackets_root_finder() {
    let (n, big_b) = (30, 901);
    let c = critical_survival(n, big_b).unwrap();
    let n_a = c.alias_count as f64;
    let crosses = |a: f64| {
        let b = (1.0 - a / SQRT_2) / n_a;
        let f = DirichletForm::new(a, b, n, big_b).unwrap();
        !exact_zero_crossings(&LearnedFunction::Dirichlet(f))
            .unwrap()
            .is_empty()
    };
    assert!(!crosses(c.a_c * 1.001));
    assert!(crosses(c.a_c * 0.999));
    assert!(
        (c.s_c - HAND_SURVIVAL_THRESHOLD).abs() < 0.01,
        "s_c = {}",
        c.s_c
    );
}

#[test]
fn quadratic_lobes() {
    for (n, q, big_b) in [(8, 1.95, 1537), (32, 1.95, 2049), (16, 1.75, 1025)] {
        let e = BilevelEnsemble::with_feature_count(n, 2.0, q, big_b).unwrap();
        let f = DirichletForm::from_ensemble(&e).unwrap();
        let set = exact_zero_crossings(&LearnedFunction::Dirichlet(f)).unwrap();
        let crossing = crossing_lobes(&set, &f);
        let h = f.half_order();
        let upper = k_star_bounds(f.a, f.b, f.feature_count(), n).upper.ceil() as usize;
        for k in 1..=(h / n as f64 / 2.0) as usize {
            let lobe = quadratic_lobe(k, f.a, f.b, f.feature_count(), n).unwrap();
            assert_eq!(lobe.width.is_some(), crossing.contains(&k), "n={n} k={k}");
            assert!(lobe.gap <= 2.0 / h + 1e-15, "n={n} k={k}: gap {}", lobe.gap);
            if k > upper {
                assert!(lobe.width.is_none());
            }
        }
    }
}

#[test]
fn golden_case_padding_chains() {
    let f = DirichletForm::new(0.13, 0.0055, 30, 4930).unwrap();
    let set = exact_zero_crossings(&LearnedFunction::Dirichlet(f)).unwrap();
    assert_eq!(set.roots.len(), 2);
    let padded = padded_intervals(&set, 2.0 * PI / f.half_order());
    assert_eq!(padded.len(), 1, "{padded:?}");
}
