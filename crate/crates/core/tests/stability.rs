mod common;

use common::*;
use gstrand_core::algebra::AlgebraId;
use gstrand_core::dynamics::ModelSpec;
use gstrand_core::stability::*;
use num_complex::Complex64;
use proptest::prelude::*;

fn so3(r: f64, a: f64, c: f64) -> ModelSpec {
    ModelSpec::so3(table(AlgebraId::So3), r, a, c, [0.0, 0.0, 1.0]).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn roots_solve_the_polynomial(
        m in -4.0..4.0f64, n in -4.0..4.0f64, a in 0.05..3.0f64, r in -2.0..2.0f64, k in -6.0..6.0f64,
    ) {
        let d = dispersion_roots_so3(m, n, a, r, k);
        for z in d.omega_roots {
            prop_assert!(dispersion_residual_so3(m, n, a, r, k, z) <= 1e-9, "{z}");
        }
        prop_assert!(conjugate_mismatch(&d.omega_roots) <= 1e-9 * (1.0 + m * m + n.abs() + a * k.abs()));
    }

    #[test]
    fn speed_only_shifts_roots(m in -4.0..4.0f64, n in -4.0..4.0f64, a in 0.05..3.0f64, r in -2.0..2.0f64, k in -6.0..6.0f64) {
        let base = dispersion_roots_so3(m, n, a, 0.0, k);
        let moved = dispersion_roots_so3(m, n, a, r, k);
        for (x, y) in base.omega_roots.iter().zip(&moved.omega_roots) {
            prop_assert_eq!(*x - r * k, *y);
        }
        prop_assert!((base.max_growth - moved.max_growth).abs() <= 1e-12 * (1.0 + base.max_growth));
    }

    #[test]
    fn band_classification_follows_the_discriminant(
        m in -4.0..4.0f64, n in -4.0..4.0f64, a in 0.05..3.0f64, frac in 0.0..1.0f64,
    ) {
        let b = m * m - 2.0 * a * n;
        prop_assume!(b >= 0.0);
        let k = frac * n.abs();
        let disc = b * b - 4.0 * a * a * (n * n - k * k);
        // skip points too close to the edge to call
        prop_assume!(disc.abs() > 1e-6 * (1.0 + b * b));
        let d = dispersion_roots_so3(m, n, a, 0.3, k);
        prop_assert_eq!(d.stable, disc > 0.0, "disc {}", disc);
    }

    #[test]
    fn sl2r_growth_is_square_root(a in -3.0..3.0f64, k in -8.0..8.0f64, r in -1.0..1.0f64) {
        let d = dispersion_roots_sl2r(a, r, k);
        prop_assert!((d.max_growth - (a * k).abs().sqrt() / 2f64.sqrt()).abs() <= 1e-12 * (1.0 + d.max_growth));
        prop_assert_eq!(d.stable, a * k == 0.0);
    }
}

#[test]
fn jacobian_parallel_branch_is_minus_rk() {
    for (m, n, k) in [(1.0, 0.5, 1.0), (2.0, -1.0, 3.0), (0.0, 1.5, 2.0)] {
        let model = so3(0.3, 1.0, 1.0);
        let spec = jacobian_spectrum(m, n, &model, k).unwrap();
        let hits = spec.omega.iter().filter(|w| (**w - Complex64::new(-0.3 * k, 0.0)).norm() < 1e-8).count();
        assert!(hits >= 2, "{:?}", spec.omega);
    }
}

#[test]
fn jacobian_sigma_and_omega_agree() {
    let model = so3(0.4, 1.2, 0.7);
    let spec = jacobian_spectrum(1.0, 0.5, &model, 2.0).unwrap();
    for (s, w) in spec.sigma.iter().zip(&spec.omega) {
        assert!((*s - Complex64::new(0.0, -1.0) * *w).norm() < 1e-12);
    }
    let best = spec.sigma.iter().map(|s| s.re).fold(f64::NEG_INFINITY, f64::max);
    assert!((best - spec.max_growth).abs() < 1e-12);
}

#[test]
fn doubling_the_seed_keeps_the_rate() {
    let model = so3(0.3, 1.0, 1.0);
    let one = seeded_growth(&model, 1.0, 0.5, 1, 1e-6, 32, 60.0);
    let two = seeded_growth(&model, 1.0, 0.5, 1, 2e-6, 32, 60.0);
    assert!(!one.fit.oscillation && !two.fit.oscillation);
    assert!((one.fit.rate - two.fit.rate).abs() <= 0.01 * one.fit.rate, "{} vs {}", one.fit.rate, two.fit.rate);
    assert!((one.fit.rate - one.spectrum.max_growth).abs() <= 0.05 * one.spectrum.max_growth);
}

#[test]
fn stable_mode_is_flagged_as_oscillation() {
    let model = so3(0.3, 1.0, 1.0);
    let spec = jacobian_spectrum(2.0, 1.0, &model, 1.0).unwrap();
    assert!(spec.max_growth <= 1e-9, "{}", spec.max_growth);
    let run = seeded_growth(&model, 2.0, 1.0, 1, 1e-6, 32, 20.0);
    assert!(run.fit.oscillation);
    assert_eq!(run.fit.rate, 0.0);
}

#[test]
fn formula_and_jacobian_are_compared_not_gated() {
    let model = so3(0.3, 1.0, 1.0);
    let cmp = compare_formula_so3(3.0, 3.0, &model, 2.0).unwrap();
    assert!(cmp.formula.max_growth > 0.5);
    assert!(cmp.jacobian.max_growth <= 1e-9);
    assert!(cmp.growth_difference > 0.5);
}
