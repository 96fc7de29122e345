// SPDX-License-Identifier: Apache-2.0

//! The five subcommands. Each returns the summary lines it printed.

use std::path::Path;

use qbm_core::coeffs::{chi_of, compute_dpp, cp_check, friction_ratio, TMatrixModel};
use qbm_core::correspondence::{compare_relaxation, RelaxationSetup};
use qbm_core::fokker_planck::{fp_solve, stability_bound, FPGrid};
use qbm_core::liouvillian::*;
use qbm_core::operators::{HamiltonianKind, HilbertConfig};
use qbm_core::propagation::{positivity_breach_time, propagate, IntegratorConfig, Method};
use qbm_core::states::gaussian_state;
use qbm_core::structure_factor::*;

use crate::config::*;
use crate::output::{num, output_dir, write, Table};
use crate::CliError;

type Summary = Vec<(String, String)>;

fn line(summary: &mut Summary, key: &str, value: String) {
    println!("{key}={value}");
    summary.push((key.to_string(), value));
}

fn finish(cfg: &RunConfig, name: &str, table: &Table, path: &Path, summary: &Summary) -> Result<(), CliError> {
    let dir = output_dir(cfg.output.as_ref().and_then(|o| o.dir.as_deref()));
    let csv = write(&dir, name, table, path, summary)?;
    eprintln!("wrote {}", csv.display());
    Ok(())
}

fn hilbert(cfg: &RunConfig) -> Result<HilbertConfig, CliError> {
    let h = require(&cfg.hilbert, "hilbert")?;
    let dim = need(h.dim, "hilbert.dim")?;
    Ok(HilbertConfig::new(dim, h.hbar, h.mass, h.omega_basis)?)
}

fn gas(cfg: &RunConfig) -> Result<GasThermodynamics, CliError> {
    let g = require(&cfg.gas, "gas")?;
    let statistics = match g.statistics {
        StatisticsKey::MaxwellBoltzmann => Statistics::MaxwellBoltzmann,
        StatisticsKey::Bose => Statistics::Bose,
        StatisticsKey::Fermi => Statistics::Fermi,
    };
    Ok(GasThermodynamics::new(g.beta, g.gas_mass, g.fugacity, statistics)?)
}

fn tmatrix(cfg: &RunConfig) -> Result<TMatrixModel, CliError> {
    let t = require(&cfg.tmatrix, "tmatrix")?;
    let model = match t.model {
        TMatrixKey::Constant => {
            if t.sigma_q.is_some() {
                return Err(CliError::config("tmatrix.sigma_q is not used by the constant model"));
            }
            TMatrixModel::Constant { t0: t.t0 }
        }
        TMatrixKey::Gaussian => TMatrixModel::Gaussian {
            t0: t.t0,
            sigma_q: need(t.sigma_q, "tmatrix.sigma_q")?,
        },
    };
    model.validate()?;
    Ok(model)
}

/// Generator spec, or `None` for the purely unitary kind.
fn generator(cfg: &RunConfig, h: &HilbertConfig) -> Result<(HamiltonianKind, Option<GeneratorKind>), CliError> {
    let g = require(&cfg.generator, "generator")?;
    g.check_keys()?;
    let hamiltonian = match g.potential {
        Potential::Free => HamiltonianKind::Free,
        Potential::Harmonic => HamiltonianKind::Harmonic {
            omega_trap: need(g.omega_trap, "generator.omega_trap")?,
        },
    };
    let kind = match g.kind {
        GeneratorKindKey::Unitary => None,
        GeneratorKindKey::CaldeiraLeggett => Some(GeneratorKind::CaldeiraLeggett {
            gamma: need(g.gamma, "generator.gamma")?,
            beta: need(g.beta, "generator.beta")?,
        }),
        GeneratorKindKey::Bilinear => Some(GeneratorKind::Bilinear(BilinearCoefficients {
            gamma: need(g.gamma, "generator.gamma")?,
            mu: g.mu.unwrap_or(0.0),
            d_pp: need(g.d_pp, "generator.d_pp")?,
            d_xx: g.d_xx.unwrap_or(0.0),
            d_xp: g.d_xp.unwrap_or(0.0),
            fugacity: g.fugacity.unwrap_or(1.0),
        })),
        GeneratorKindKey::MinimalQbm => {
            let beta = need(g.beta, "generator.beta")?;
            // D_pp directly, or through the friction it implies
            let d_pp = match (g.d_pp, g.gamma) {
                (Some(d), None) => d,
                (None, Some(gamma)) => caldeira_leggett_dpp(gamma, beta, h.mass),
                _ => return Err(CliError::config("minimal_qbm needs exactly one of generator.d_pp and generator.gamma")),
            };
            Some(GeneratorKind::MinimalQbm {
                d_pp,
                beta,
                fugacity: g.fugacity.unwrap_or(1.0),
            })
        }
        GeneratorKindKey::BoltzmannCollision => {
            let gas = gas(cfg)?;
            if gas.statistics != Statistics::MaxwellBoltzmann {
                return Err(CliError::config("gas.statistics must be maxwell_boltzmann for boltzmann_collision"));
            }
            Some(GeneratorKind::BoltzmannCollision(CollisionParameters::gauss_legendre(
                gas.gas_mass,
                gas.beta,
                g.fugacity.unwrap_or(1.0),
                tmatrix(cfg)?,
                need(g.q_max, "generator.q_max")?,
                need(g.q_nodes, "generator.q_nodes")?,
            )?))
        }
    };
    Ok((hamiltonian, kind))
}

fn integrator(cfg: &RunConfig) -> Result<IntegratorConfig, CliError> {
    let i = require(&cfg.integrator, "integrator")?;
    let icfg = match i.method {
        MethodKey::Rk45 => {
            if i.dt.is_some() {
                return Err(CliError::config("integrator.dt is not used by rk45; set dt_init"));
            }
            let rtol = i.rtol.unwrap_or(1e-8);
            IntegratorConfig {
                method: Method::Rk45Adaptive {
                    rtol,
                    atol: i.atol.unwrap_or(rtol * 1e-2),
                    dt_init: i.dt_init.unwrap_or(1e-3),
                },
                t_final: i.t_final,
                monitor_stride: i.monitor_stride,
            }
        }
        MethodKey::Rk4 => {
            for (key, set) in [("rtol", i.rtol.is_some()), ("atol", i.atol.is_some()), ("dt_init", i.dt_init.is_some())] {
                if set {
                    return Err(CliError::config(format!("integrator.{key} is not used by rk4")));
                }
            }
            IntegratorConfig::rk4(i.t_final, need(i.dt, "integrator.dt")?, i.monitor_stride)
        }
    };
    icfg.validate()?;
    Ok(icfg)
}

pub fn evolve(cfg: &RunConfig, path: &Path) -> Result<(), CliError> {
    let h = hilbert(cfg)?;
    let (hamiltonian, kind) = generator(cfg, &h)?;
    let icfg = integrator(cfg)?;
    let threshold = require(&cfg.integrator, "integrator")?.breach_threshold;
    let state = cfg.state.as_ref();
    let var_x = state
        .and_then(|s| s.var_x)
        .unwrap_or(h.hbar / (2.0 * h.mass * h.omega_basis));
    let rho = gaussian_state(
        &h,
        state.map_or(0.0, |s| s.mean_x),
        state.map_or(0.0, |s| s.mean_p),
        var_x,
    )?;
    let l = match kind {
        Some(kind) => build(&h, &LiouvillianSpec { hamiltonian, kind })?,
        None => {
            let hm = qbm_core::operators::build_hamiltonian(&h, hamiltonian)?;
            Generator::hamiltonian(hm.matrix(), h.hbar)
        }
    };
    let rec = propagate(&rho, &l, &h, &icfg)?;

    let mut table = Table::new("t,trace,min_eig,purity,mean_x,mean_p,var_x,var_p");
    for k in 0..rec.len() {
        table.push(vec![
            rec.times[k],
            rec.trace[k],
            rec.min_eig[k],
            rec.purity[k],
            rec.mean_x[k],
            rec.mean_p[k],
            rec.var_x[k],
            rec.var_p[k],
        ]);
    }
    let mut summary = Summary::new();
    let breach = positivity_breach_time(&rec, threshold).map_or("none".to_string(), num);
    line(&mut summary, "positivity_breach_t", breach);
    line(&mut summary, "trace_drift", num(rec.trace_drift()));
    line(&mut summary, "hermiticity_drift", num(rec.max_hermiticity_defect()));
    line(&mut summary, "accepted_steps", rec.accepted_steps.to_string());
    finish(cfg, "evolve", &table, path, &summary)
}

pub fn coeffs(cfg: &RunConfig, path: &Path) -> Result<(), CliError> {
    let gas = gas(cfg)?;
    let tmatrix = tmatrix(cfg)?;
    let (hbar, mass) = match &cfg.hilbert {
        Some(h) => (h.hbar, h.mass),
        None => (1.0, 1.0),
    };
    let c = compute_dpp(&tmatrix, &gas, mass, hbar)?;
    let chi = chi_of(&c, &gas, mass, hbar)?;
    let cp = cp_check(&c, hbar);
    let ratio = friction_ratio(&gas)?;
    let mut table = Table::new("D_pp,D_xx,gamma,mu,chi,cp_margin,friction_ratio");
    table.push(vec![c.d_pp, c.d_xx, c.gamma, c.mu, chi, cp.margin(), ratio]);
    let mut summary = Summary::new();
    line(&mut summary, "chi", format!("{chi:.15}"));
    line(&mut summary, "cp_margin", num(cp.margin()));
    line(&mut summary, "cp_satisfied", cp.is_satisfied().to_string());
    line(&mut summary, "friction_ratio", num(ratio));
    line(&mut summary, "statistics_prefactor", num(statistics_prefactor(&gas)?));
    finish(cfg, "coeffs", &table, path, &summary)
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![lo],
        _ => (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect(),
    }
}

/// Largest relative detailed-balance residual accepted on the tabulated grid.
const DETAILED_BALANCE_TOL: f64 = 1e-10;

pub fn dsf(cfg: &RunConfig, path: &Path) -> Result<(), CliError> {
    let gas = gas(cfg)?;
    let d = require(&cfg.dsf, "dsf")?;
    if !(d.q_min > 0.0 && d.q_max >= d.q_min) {
        return Err(CliError::config(format!(
            "dsf.q_min and dsf.q_max must satisfy 0 < q_min <= q_max, got {} and {}",
            d.q_min, d.q_max
        )));
    }
    if d.q_points == 0 || d.e_points == 0 || !(d.e_max >= d.e_min) {
        return Err(CliError::config("dsf grid needs q_points, e_points >= 1 and e_min <= e_max"));
    }
    let mut table = Table::new("q,E,S");
    let mut balance = 0.0_f64;
    let (mut worst0, mut worst_f) = (1.0_f64, 1.0_f64);
    for q in linspace(d.q_min, d.q_max, d.q_points) {
        for e in linspace(d.e_min, d.e_max, d.e_points) {
            let s = s_mb(q, e, &gas)?;
            table.push(vec![q, e, s]);
            let forward = (-gas.beta * e).exp() * s;
            let mirrored = s_mb(q, -e, &gas)?;
            if forward > f64::MIN_POSITIVE && mirrored > f64::MIN_POSITIVE {
                balance = balance.max((mirrored - forward).abs() / forward);
            }
        }
        let s0 = sum_rule_zeroth(q, &gas)?;
        let f_ratio = sum_rule_f(q, &gas)? / (q * q / (2.0 * gas.gas_mass));
        if (s0 - 1.0).abs() > (worst0 - 1.0).abs() {
            worst0 = s0;
        }
        if (f_ratio - 1.0).abs() > (worst_f - 1.0).abs() {
            worst_f = f_ratio;
        }
    }
    let mut summary = Summary::new();
    line(&mut summary, "sum_rule_0", num(worst0));
    line(&mut summary, "sum_rule_f_ratio", num(worst_f));
    line(&mut summary, "detailed_balance_max_rel", num(balance));
    finish(cfg, "dsf", &table, path, &summary)?;
    if balance > DETAILED_BALANCE_TOL {
        return Err(CliError::Numerical(format!(
            "detailed balance residual {balance:e} exceeds {DETAILED_BALANCE_TOL:e}"
        )));
    }
    Ok(())
}

/// Rows recorded by default.
const DEFAULT_FP_ROWS: usize = 200;

pub fn fp(cfg: &RunConfig, path: &Path) -> Result<(), CliError> {
    let f = require(&cfg.fp, "fp")?;
    let grid = match f.initial {
        FpInitialKey::Gaussian => FPGrid::gaussian(
            -f.v_max,
            f.v_max,
            f.cells,
            f.mean.unwrap_or(0.0),
            need(f.var, "fp.var")?,
        )?,
        FpInitialKey::Maxwell => {
            if f.mean.is_some() || f.var.is_some() {
                return Err(CliError::config("fp.mean and fp.var are not used by the maxwell initial state"));
            }
            FPGrid::maxwell(f.v_max, f.cells, f.eta, f.d_v)?
        }
    };
    let bound = stability_bound(&grid, f.eta, f.d_v);
    let dt = match f.dt {
        Some(dt) => dt,
        None if bound.is_finite() => 0.5 * bound,
        None => f.t_final,
    };
    let steps = (f.t_final / dt).ceil().max(1.0) as usize;
    let record_every = f.record_every.unwrap_or((steps / DEFAULT_FP_ROWS).max(1));
    let sol = fp_solve(&grid, f.eta, f.d_v, f.t_final, dt, record_every)?;
    let mut table = Table::new("t,mass,mean_v,var_v");
    for k in 0..sol.times.len() {
        table.push(vec![sol.times[k], sol.mass[k], sol.mean[k], sol.var[k]]);
    }
    let mut summary = Summary::new();
    line(&mut summary, "stationary_var", num(*sol.var.last().unwrap_or(&f64::NAN)));
    if f.eta > 0.0 {
        line(&mut summary, "expected_stationary_var", num(f.d_v / f.eta));
    }
    let m0 = sol.mass[0];
    let drift = sol.mass.iter().map(|m| (m - m0).abs()).fold(0.0, f64::max);
    line(&mut summary, "mass_drift", num(drift));
    finish(cfg, "fp", &table, path, &summary)
}

pub fn compare(cfg: &RunConfig, path: &Path) -> Result<(), CliError> {
    let h = hilbert(cfg)?;
    let c = require(&cfg.compare, "compare")?;
    let mut setup = RelaxationSetup::matched(h, c.d_pp, c.beta, c.fugacity.unwrap_or(1.0));
    setup.mean_p = c.mean_p.unwrap_or(setup.mean_p);
    setup.var_x = c.var_x.unwrap_or(setup.var_x);
    setup.t_final = c.t_final.unwrap_or(setup.t_final);
    setup.samples = c.samples.unwrap_or(setup.samples);
    setup.rtol = c.rtol.unwrap_or(setup.rtol);
    setup.fp_cells = c.fp_cells.unwrap_or(setup.fp_cells);
    setup.fp_width = c.fp_width.unwrap_or(setup.fp_width);
    setup.eta_scale = c.eta_scale.unwrap_or(setup.eta_scale);
    let r = compare_relaxation(&setup)?;
    let mut table = Table::new("t,var_p_quantum,var_p_classical,rel_diff");
    for k in 0..r.times.len() {
        table.push(vec![r.times[k], r.var_p_quantum[k], r.var_p_classical[k], r.rel_diff[k]]);
    }
    let mut summary = Summary::new();
    line(&mut summary, "max_rel_diff", num(r.max_rel_diff));
    line(&mut summary, "trace_drift", num(r.trace_drift));
    line(&mut summary, "hermiticity_drift", num(r.hermiticity_drift));
    finish(cfg, "compare", &table, path, &summary)
}
