use proptest::prelude::*;

use swkb_core::analysis::{alpha_sweep, slope_closed_form, swkb_integral, swkb_residual};
use swkb_core::model::{potential, w, w_prime};
use swkb_core::spectrum::{numerov_solve, NumerovGrid};
use swkb_core::turning::{conventional_turning_points, swkb_turning_points};
use swkb_core::{ModelParams, Partner, QuadratureConfig};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn omega_scaling_covariance(y in 0.01f64..30.0, ell in 1.0f64..50.0, alpha in 0.0f64..=1.0, omega in 0.05f64..20.0) {
        let scaled = ModelParams::new(ell, omega, alpha).unwrap();
        let unit = ModelParams::unit(ell, alpha).unwrap();
        let lhs = w(&(y / omega.sqrt()), &scaled).unwrap();
        let rhs = omega.sqrt() * w(&y, &unit).unwrap();
        let scale = (ell / y + y).max(1.0) * omega.sqrt();
        prop_assert!((lhs - rhs).abs() <= 1e-13 * scale, "{lhs} vs {rhs}");
    }

    #[test]
    fn derivative_matches_central_difference(x in 0.01f64..40.0, ell in 1.0f64..100.0, alpha in 0.0f64..=1.0) {
        let p = ModelParams::unit(ell, alpha).unwrap();
        let h = 1e-6 * x;
        let numeric = (w(&(x + h), &p).unwrap() - w(&(x - h), &p).unwrap()) / (2.0 * h);
        let exact = w_prime(&x, &p).unwrap();
        let scale = exact.abs().max(w(&x, &p).unwrap().abs() / x);
        prop_assert!((numeric - exact).abs() <= 1e-8 * scale, "{numeric} vs {exact}");
    }

    #[test]
    fn partner_sum_and_difference(x in 0.01f64..40.0, ell in 1.0f64..20.0, alpha in 0.0f64..=1.0) {
        let p = ModelParams::unit(ell, alpha).unwrap();
        let minus = potential(&x, &p, Partner::Minus).unwrap();
        let plus = potential(&x, &p, Partner::Plus).unwrap();
        let wx = w(&x, &p).unwrap();
        let dw = w_prime(&x, &p).unwrap();
        let scale = (wx * wx).max(dw.abs()).max(1.0);
        prop_assert!((minus + plus - 2.0 * wx * wx).abs() <= 1e-14 * scale);
        prop_assert!((plus - minus - 2.0 * dw).abs() <= 1e-14 * scale);
    }

    #[test]
    fn w_diverges_at_both_ends(ell in 1.0f64..100.0, alpha in 0.0f64..=1.0) {
        let p = ModelParams::unit(ell, alpha).unwrap();
        prop_assert!(w(&1e-8, &p).unwrap() < -1e7);
        prop_assert!(w(&1e8, &p).unwrap() > 1e7);
    }

    #[test]
    fn slope_is_positive(n in 1u32..2000, ell in 1.0f64..5000.0) {
        prop_assert!(slope_closed_form(n, ell).unwrap() > 0.0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn turning_points_bound_the_allowed_region(n in 1u32..12, ell in 1.0f64..40.0, alpha in 0.0f64..=1.0) {
        let p = ModelParams::unit(ell, alpha).unwrap();
        let tp = swkb_turning_points(n, &p, 1e-14).unwrap();
        prop_assert!(0.0 < tp.x_left && tp.x_left < tp.x_right);
        let energy = 2.0 * f64::from(n);
        for i in 1..=1000 {
            let x = tp.x_left + (tp.x_right - tp.x_left) * f64::from(i) / 1001.0;
            prop_assert!(energy - w(&x, &p).unwrap().powi(2) > 0.0, "x={x}");
        }
    }

    #[test]
    fn turning_points_move_continuously(n in 1u32..8, ell in 1.0f64..20.0, alpha in 0.0f64..0.999) {
        let a = swkb_turning_points(n, &ModelParams::unit(ell, alpha).unwrap(), 1e-14).unwrap();
        let b = swkb_turning_points(n, &ModelParams::unit(ell, alpha + 1e-6).unwrap(), 1e-14).unwrap();
        prop_assert!((a.x_left - b.x_left).abs() < 1e-3);
        prop_assert!((a.x_right - b.x_right).abs() < 1e-3);
    }

    #[test]
    fn numeric_roots_match_closed_form(n in 1u32..50, ell in 1.0f64..60.0) {
        let numeric = swkb_turning_points(n, &ModelParams::unit(ell, 0.0).unwrap(), 1e-14).unwrap();
        let exact = conventional_turning_points(n, &ell, &1.0).unwrap();
        prop_assert!((numeric.x_left / exact.x_left - 1.0).abs() < 1e-12);
        prop_assert!((numeric.x_right / exact.x_right - 1.0).abs() < 1e-12);
    }
}

#[test]
fn exactness_on_the_conventional_member() {
    let cfg = QuadratureConfig::double();
    for n in 1..=10 {
        for ell in [1.0, 2.0, 3.0, 5.0, 10.0] {
            let r = swkb_integral(n, ell, 0.0, &cfg).unwrap();
            assert!(r.residual.abs() < 1e-10, "n={n} ell={ell}");
        }
    }
}

#[test]
fn residual_decreases_with_ell() {
    let cfg = QuadratureConfig::double();
    for n in 1..=3 {
        let r: Vec<f64> = [1.0, 2.0, 3.0]
            .iter()
            .map(|&ell| swkb_residual(n, ell, 1.0, &cfg).unwrap())
            .collect();
        assert!(r[0] > r[1] && r[1] > r[2], "n={n}: {r:?}");
    }
}

#[test]
fn tighter_tolerance_stays_within_previous_error_estimate() {
    let loose = QuadratureConfig {
        abs_tol: 1e-8,
        ..QuadratureConfig::double()
    };
    let tight = QuadratureConfig {
        abs_tol: 0.5e-8,
        ..QuadratureConfig::double()
    };
    for (n, ell, alpha) in [(1, 1.0, 1.0), (3, 2.0, 0.5), (7, 5.0, 0.0)] {
        let a = swkb_integral(n, ell, alpha, &loose).unwrap();
        let b = swkb_integral(n, ell, alpha, &tight).unwrap();
        assert!((a.integral - b.integral).abs() <= a.quad_error_estimate.max(1e-15));
    }
}

#[test]
fn repeated_runs_are_bit_identical() {
    let cfg = QuadratureConfig::double();
    let alphas: Vec<f64> = (0..=20).map(|i| f64::from(i) / 20.0).collect();
    let a = alpha_sweep(1, 2.0, &alphas, &cfg).unwrap();
    let b = alpha_sweep(1, 2.0, &alphas, &cfg).unwrap();
    assert_eq!(a, b);
    let bits = |s: &swkb_core::analysis::AlphaSweep| {
        s.series
            .records()
            .iter()
            .map(|r| r.residual.to_bits())
            .collect::<Vec<_>>()
    };
    assert_eq!(bits(&a), bits(&b));
}

#[test]
fn spectrum_is_grid_converged_and_alpha_independent() {
    let e_tol = 1e-8;
    for ell in [1.0, 2.0] {
        let p0 = ModelParams::unit(ell, 0.0).unwrap();
        let p1 = ModelParams::unit(ell, 1.0).unwrap();
        let grid = NumerovGrid::for_levels(&p0, 3);
        let half = NumerovGrid {
            step: grid.step / 2.0,
            ..grid
        };
        let coarse = numerov_solve(&p1, 3, &grid, e_tol).unwrap();
        let fine = numerov_solve(&p1, 3, &half, e_tol).unwrap();
        let conventional = numerov_solve(&p0, 3, &grid, e_tol).unwrap();
        for k in 0..=3 {
            assert!(
                (coarse.eigenvalues[k] - fine.eigenvalues[k]).abs() < e_tol,
                "ell={ell} k={k}"
            );
            assert!((coarse.eigenvalues[k] - conventional.eigenvalues[k]).abs() < 2.0 * e_tol);
        }
        assert_eq!(fine.node_counts, vec![0, 1, 2, 3]);
    }
}
