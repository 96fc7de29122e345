// SPDX-License-Identifier: Apache-2.0

mod common;

use common::log_slope;
use proptest::prelude::*;
use qbm_core::correspondence::{compare_relaxation, RelaxationSetup};
use qbm_core::fokker_planck::*;
use qbm_core::operators::HilbertConfig;
use qbm_core::Error;

/// |var(t) − exact| at `t` for an `n`-cell grid with `dt ∝ Δv²`.
fn transient_variance_error(n: usize, t: f64) -> f64 {
    let (eta, d_v) = (1.0, 1.0);
    let grid = FPGrid::gaussian(-10.0, 10.0, n, 0.0, 0.25).unwrap();
    let v0 = grid.variance();
    let dt = 0.1 * grid.dv() * grid.dv() / (2.0 * d_v);
    let sol = fp_solve(&grid, eta, d_v, t, dt, usize::MAX).unwrap();
    let exact = d_v / eta + (v0 - d_v / eta) * (-2.0 * eta * t).exp();
    (sol.var.last().unwrap() - exact).abs()
}

#[test]
fn grid_refinement_is_second_order() {
    let errors: Vec<f64> = [50, 100, 200, 400].iter().map(|&n| transient_variance_error(n, 0.5)).collect();
    for w in errors.windows(2) {
        assert!(w[0] / w[1] >= 3.5, "{errors:?}");
    }
}

#[test]
fn maxwell_density_is_stationary() {
    let (eta, d_v) = (0.8_f64, 0.8 / (2.0 * 1.5));
    let grid = FPGrid::maxwell(6.0 * (d_v / eta).sqrt(), 400, eta, d_v).unwrap();
    let dt = stability_bound(&grid, eta, d_v);
    let mut g = grid.clone();
    for _ in 0..100 {
        let next = fp_step(&g, eta, d_v, dt).unwrap();
        let change = next.p.iter().zip(&g.p).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(change < 1e-10);
        g = next;
    }
    // D_v = η/(Mβ) with M = 2, β = 1.5
    let target = 1.0 / (2.0 * 1.5);
    assert!((g.variance() - target).abs() < 5e-3 * target);
}

#[test]
fn pure_diffusion_spreads_linearly() {
    let d_v = 0.5;
    let grid = FPGrid::gaussian(-20.0, 20.0, 800, 0.0, 0.5).unwrap();
    let v0 = grid.variance();
    let t = 4.0;
    let sol = fp_solve(&grid, 0.0, d_v, t, 0.4 * grid.dv().powi(2) / (2.0 * d_v), 100).unwrap();
    for (t, var) in sol.times.iter().zip(&sol.var) {
        let want = v0 + 2.0 * d_v * t;
        assert!((var - want).abs() < 5e-3 * want, "t {t}: {var} vs {want}");
    }
}

#[test]
fn moments_follow_their_ordinary_differential_equations() {
    let (eta, d_v) = (1.3, 0.65);
    let grid = FPGrid::gaussian(-8.0, 8.0, 600, 1.2, 0.1).unwrap();
    let m0 = grid.mean();
    let t_final = 2.0 / eta;
    let dt = stability_bound(&grid, eta, d_v);
    let sol = fp_solve(&grid, eta, d_v, t_final, dt, 50).unwrap();
    let var_inf = d_v / eta;
    for k in 0..sol.times.len() {
        let t = sol.times[k];
        let mean = m0 * (-eta * t).exp();
        assert!((sol.mean[k] - mean).abs() < 0.01 * mean.abs(), "mean at {t}");
    }
    let excess: Vec<f64> = sol.var.iter().map(|v| v - var_inf).collect();
    let rate = -log_slope(&sol.times, &excess);
    assert!((rate - 2.0 * eta).abs() < 0.01 * 2.0 * eta, "{rate}");
}

#[test]
fn mass_is_conserved_every_step() {
    let (eta, d_v) = (2.0, 0.3);
    let mut g = FPGrid::gaussian(-5.0, 5.0, 300, 2.0, 0.05).unwrap();
    let dt = stability_bound(&g, eta, d_v);
    for _ in 0..500 {
        let before = g.mass();
        g = fp_step(&g, eta, d_v, dt).unwrap();
        assert!((g.mass() - before).abs() < 1e-14);
        assert!(g.p.iter().all(|&p| p >= -1e-15));
    }
}

#[test]
fn step_rejects_unstable_time_steps() {
    let g = FPGrid::gaussian(-5.0, 5.0, 100, 0.0, 1.0).unwrap();
    let bound = stability_bound(&g, 1.0, 1.0);
    assert!(matches!(fp_step(&g, 1.0, 1.0, 1.01 * bound), Err(Error::StabilityBound { .. })));
    assert!(fp_step(&g, -1.0, 1.0, 0.5 * bound).is_err());
    assert!(FPGrid::gaussian(1.0, 5.0, 100, 0.0, 1.0).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn steps_preserve_mass_and_sign(
        eta in 0.0f64..3.0,
        d_v in 0.0f64..2.0,
        mean in -1.0f64..1.0,
        var in 0.05f64..1.0,
        n in 20usize..200,
    ) {
        let mut g = FPGrid::gaussian(-6.0, 6.0, n, mean, var).unwrap();
        let bound = stability_bound(&g, eta, d_v);
        let dt = if bound.is_finite() { bound } else { 0.1 };
        for _ in 0..20 {
            let before = g.mass();
            g = fp_step(&g, eta, d_v, dt).unwrap();
            prop_assert!((g.mass() - before).abs() < 1e-14);
            prop_assert!(g.p.iter().all(|&p| p >= -1e-15));
        }
    }
}

fn comparison_setup() -> RelaxationSetup {
    let mut s = RelaxationSetup::matched(HilbertConfig::new(40, 1.0, 1.0, 1.0).unwrap(), 2.0, 1.0, 1.0);
    s.t_final = 1.5;
    s.samples = 15;
    s
}

#[test]
fn quantum_and_classical_variances_agree() {
    let r = compare_relaxation(&comparison_setup()).unwrap();
    assert!(r.max_rel_diff < 0.02, "{}", r.max_rel_diff);
    assert!(r.trace_drift < 1e-10);
    assert!(r.hermiticity_drift < 1e-10);
}

#[test]
fn mismatched_friction_is_detected() {
    let s = RelaxationSetup { eta_scale: 1.5, ..comparison_setup() };
    let r = compare_relaxation(&s).unwrap();
    assert!(r.max_rel_diff > 0.1, "{}", r.max_rel_diff);
}

#[test]
fn zero_fugacity_leaves_both_variances_constant() {
    let s = RelaxationSetup { fugacity: 0.0, ..comparison_setup() };
    let r = compare_relaxation(&s).unwrap();
    assert!(r.max_rel_diff < 1e-10, "{:e}", r.max_rel_diff);
    let v0 = r.var_p_quantum[0];
    assert!(r.var_p_quantum.iter().all(|v| (v - v0).abs() < 1e-10));
}
