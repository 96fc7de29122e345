// SPDX-License-Identifier: Apache-2.0

//! Browser bindings for three interactive experiments: the ideal-gas
//! structure factor, quantum-classical relaxation, and the positivity
//! contrast between the Caldeira-Leggett and minimal generators.
//!
//! Every export returns a flat `Float64Array` of row-major records. The
//! plain Rust functions behind them are tested natively.

use qbm_core::correspondence::{compare_relaxation, RelaxationSetup};
use qbm_core::liouvillian::{build, caldeira_leggett_dpp, GeneratorKind, LiouvillianSpec};
use qbm_core::operators::{HamiltonianKind, HilbertConfig};
use qbm_core::propagation::{propagate_sampled, IntegratorConfig};
use qbm_core::states::gaussian_state;
use qbm_core::structure_factor::{s_mb, sum_rule_f, sum_rule_zeroth, GasThermodynamics};
use wasm_bindgen::prelude::*;

type Rows = Result<Vec<f64>, String>;

fn err(e: qbm_core::Error) -> String {
    e.to_string()
}

fn uniform(t_final: f64, samples: usize) -> Vec<f64> {
    (1..=samples).map(|k| t_final * k as f64 / samples as f64).collect()
}

/// `[E, S(q, E)]` rows on `n` energies, then one trailing row
/// `[∫S dE, ∫E S dE / (q²/2m)]`.
pub fn structure_factor_rows(q: f64, beta: f64, gas_mass: f64, e_min: f64, e_max: f64, n: usize) -> Rows {
    if n < 2 || !(e_max > e_min) {
        return Err("need at least two energies and e_max > e_min".into());
    }
    let gas = GasThermodynamics::maxwell_boltzmann(beta, gas_mass).map_err(err)?;
    let mut out = Vec::with_capacity(2 * n + 2);
    for k in 0..n {
        let e = e_min + (e_max - e_min) * k as f64 / (n - 1) as f64;
        out.push(e);
        out.push(s_mb(q, e, &gas).map_err(err)?);
    }
    out.push(sum_rule_zeroth(q, &gas).map_err(err)?);
    out.push(sum_rule_f(q, &gas).map_err(err)? / (q * q / (2.0 * gas_mass)));
    Ok(out)
}

/// `[t, var_p quantum, var_p classical]` rows, starting at `t = 0`.
pub fn relaxation_rows(dim: usize, d_pp: f64, beta: f64, fugacity: f64, t_final: f64, samples: usize, eta_scale: f64) -> Rows {
    let hilbert = HilbertConfig::natural(dim).map_err(err)?;
    let mut setup = RelaxationSetup::matched(hilbert, d_pp, beta, fugacity);
    setup.t_final = t_final;
    setup.samples = samples;
    setup.eta_scale = eta_scale;
    let r = compare_relaxation(&setup).map_err(err)?;
    Ok((0..r.times.len())
        .flat_map(|k| [r.times[k], r.var_p_quantum[k], r.var_p_classical[k]])
        .collect())
}

/// `[t, min_eig Caldeira-Leggett, min_eig minimal]` rows for a squeezed
/// pure state in a unit harmonic trap, starting at `t = 0`.
pub fn positivity_rows(dim: usize, gamma: f64, beta: f64, var_x: f64, t_final: f64, samples: usize) -> Rows {
    let cfg = HilbertConfig::natural(dim).map_err(err)?;
    let hamiltonian = HamiltonianKind::Harmonic { omega_trap: 1.0 };
    let rho = gaussian_state(&cfg, 0.0, 0.0, var_x).map_err(err)?;
    let times = uniform(t_final, samples);
    let icfg = IntegratorConfig::rk45(t_final, 1e-8, 1);
    let run = |kind| -> Result<Vec<f64>, String> {
        let l = build(&cfg, &LiouvillianSpec { hamiltonian, kind }).map_err(err)?;
        Ok(propagate_sampled(&rho, &l, &cfg, &icfg, &times).map_err(err)?.min_eig)
    };
    let cl = run(GeneratorKind::CaldeiraLeggett { gamma, beta })?;
    let d_pp = caldeira_leggett_dpp(gamma, beta, cfg.mass);
    let minimal = run(GeneratorKind::MinimalQbm { d_pp, beta, fugacity: 1.0 })?;
    Ok(std::iter::once(0.0)
        .chain(times)
        .zip(cl.iter().zip(&minimal))
        .flat_map(|(t, (a, b))| [t, *a, *b])
        .collect())
}

fn js(rows: Rows) -> Result<Vec<f64>, JsError> {
    rows.map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = structureFactor)]
pub fn structure_factor(q: f64, beta: f64, gas_mass: f64, e_min: f64, e_max: f64, n: usize) -> Result<Vec<f64>, JsError> {
    js(structure_factor_rows(q, beta, gas_mass, e_min, e_max, n))
}

#[wasm_bindgen]
pub fn relaxation(dim: usize, d_pp: f64, beta: f64, fugacity: f64, t_final: f64, samples: usize, eta_scale: f64) -> Result<Vec<f64>, JsError> {
    js(relaxation_rows(dim, d_pp, beta, fugacity, t_final, samples, eta_scale))
}

#[wasm_bindgen]
pub fn positivity(dim: usize, gamma: f64, beta: f64, var_x: f64, t_final: f64, samples: usize) -> Result<Vec<f64>, JsError> {
    js(positivity_rows(dim, gamma, beta, var_x, t_final, samples))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn structure_factor_rows_end_with_sum_rules() {
        let rows = structure_factor_rows(1.0, 1.0, 1.0, -6.0, 8.0, 50).unwrap();
        assert_eq!(rows.len(), 102);
        assert!((rows[100] - 1.0).abs() < 1e-8);
        assert!((rows[101] - 1.0).abs() < 1e-8);
        assert!(rows[..100].chunks(2).all(|r| r[1] >= 0.0));
        assert!(structure_factor_rows(-1.0, 1.0, 1.0, -1.0, 1.0, 10).is_err());
        assert!(structure_factor_rows(1.0, 1.0, 1.0, 1.0, 1.0, 10).is_err());
    }

    #[test]
    fn relaxation_rows_agree_when_matched() {
        let rows = relaxation_rows(24, 2.0, 1.0, 1.0, 1.0, 8, 1.0).unwrap();
        assert_eq!(rows.len(), 27);
        for r in rows.chunks(3) {
            assert!((r[1] - r[2]).abs() < 0.02 * r[1], "{r:?}");
        }
    }

    #[test]
    fn positivity_rows_separate_the_generators() {
        let rows = positivity_rows(16, 0.5, 10.0, 0.05, 2.0, 10).unwrap();
        assert_eq!(rows.len(), 33);
        assert!(rows.chunks(3).any(|r| r[1] < -1e-3));
        assert!(rows.chunks(3).all(|r| r[2] > -1e-8));
    }
}
