// SPDX-License-Identifier: Apache-2.0

//! Quantum-classical relaxation comparison for a free particle.
//!
//! The quantum side propagates the minimal completely positive generator
//! from a Gaussian packet; the classical side solves the velocity-space
//! Fokker-Planck equation with `η = 2zγ` and `D_v = zD_pp/M²`, started from
//! a Gaussian whose discrete variance equals the quantum `var_p/M²`. Both
//! obey `d var/dt = −4zγ var + 2zD_pp/M²`.

use crate::coeffs::CoefficientSet;
use crate::fokker_planck::{variance_at_times, FPGrid};
use crate::liouvillian::{build_minimal_qbm, GeneratorKind, LiouvillianSpec};
use crate::operators::{HamiltonianKind, HilbertConfig};
use crate::propagation::{propagate_sampled, IntegratorConfig};
use crate::states::gaussian_state;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelaxationSetup {
    pub hilbert: HilbertConfig,
    pub d_pp: f64,
    pub beta: f64,
    pub fugacity: f64,
    /// Initial mean momentum of the packet.
    pub mean_p: f64,
    /// Initial position variance; the momentum variance is `ħ²/(4 var_x)`.
    pub var_x: f64,
    pub t_final: f64,
    /// Number of uniformly spaced comparison times after `t = 0`.
    pub samples: usize,
    pub rtol: f64,
    pub fp_cells: usize,
    /// Half-width of the velocity grid in units of the larger of the initial
    /// and stationary standard deviations.
    pub fp_width: f64,
    /// Multiplies the classical friction; `1` is the matched comparison.
    pub eta_scale: f64,
}

impl RelaxationSetup {
    /// Matched comparison with the defaults used by the shipped presets.
    pub fn matched(hilbert: HilbertConfig, d_pp: f64, beta: f64, fugacity: f64) -> Self {
        Self {
            hilbert,
            d_pp,
            beta,
            fugacity,
            mean_p: 0.0,
            var_x: 0.5,
            t_final: 2.0,
            samples: 40,
            rtol: 1e-9,
            fp_cells: 400,
            fp_width: 8.0,
            eta_scale: 1.0,
        }
    }

    pub fn coefficients(&self) -> Result<CoefficientSet> {
        CoefficientSet::from_momentum_diffusion(self.d_pp, self.beta, self.hilbert.mass, self.hilbert.hbar)
    }

    /// Classical friction `η = 2zγ` (times `eta_scale`).
    pub fn eta(&self) -> Result<f64> {
        Ok(2.0 * self.fugacity * self.coefficients()?.gamma * self.eta_scale)
    }

    /// Classical velocity diffusion `D_v = zD_pp/M²`.
    pub fn d_v(&self) -> f64 {
        self.fugacity * self.d_pp / (self.hilbert.mass * self.hilbert.mass)
    }

    pub fn validate(&self) -> Result<()> {
        self.hilbert.validate()?;
        if self.samples == 0 {
            return Err(Error::param("samples", "must be at least 1"));
        }
        if !(self.eta_scale.is_finite() && self.eta_scale >= 0.0) {
            return Err(Error::param("eta_scale", format!("{} is not a non-negative number", self.eta_scale)));
        }
        if !(self.fp_width.is_finite() && self.fp_width > 0.0) {
            return Err(Error::param("fp_width", format!("{} is not positive", self.fp_width)));
        }
        Ok(())
    }
}

/// Momentum variances (quantum) and `M²·var_v` (classical) on a shared time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct RelaxationComparison {
    pub times: Vec<f64>,
    pub var_p_quantum: Vec<f64>,
    pub var_p_classical: Vec<f64>,
    pub rel_diff: Vec<f64>,
    pub max_rel_diff: f64,
    /// Largest trace drift and Hermiticity defect of the quantum run.
    pub trace_drift: f64,
    pub hermiticity_drift: f64,
}

/// Gaussian on the grid whose discrete variance equals `var` to roundoff.
fn matched_gaussian(v_min: f64, v_max: f64, n: usize, mean: f64, var: f64) -> Result<FPGrid> {
    let mut s = var;
    let mut grid = FPGrid::gaussian(v_min, v_max, n, mean, s)?;
    for _ in 0..50 {
        let got = grid.variance();
        let miss = got - var;
        if miss.abs() <= 1e-15 * var {
            break;
        }
        // discrete variance ≈ s + Δv²/12, so a unit-slope correction converges fast
        s -= miss;
        if s <= 0.0 {
            return Err(Error::param("fp_cells", "grid too coarse for the initial variance"));
        }
        grid = FPGrid::gaussian(v_min, v_max, n, mean, s)?;
    }
    Ok(grid)
}

pub fn compare_relaxation(setup: &RelaxationSetup) -> Result<RelaxationComparison> {
    setup.validate()?;
    let cfg = setup.hilbert;
    let spec = LiouvillianSpec {
        hamiltonian: HamiltonianKind::Free,
        kind: GeneratorKind::MinimalQbm {
            d_pp: setup.d_pp,
            beta: setup.beta,
            fugacity: setup.fugacity,
        },
    };
    let l = build_minimal_qbm(&cfg, &spec)?;
    let rho0 = gaussian_state(&cfg, 0.0, setup.mean_p, setup.var_x)?;
    let times: Vec<f64> = (1..=setup.samples)
        .map(|k| setup.t_final * k as f64 / setup.samples as f64)
        .collect();
    let icfg = IntegratorConfig::rk45(setup.t_final, setup.rtol, 1);
    let rec = propagate_sampled(&rho0, &l, &cfg, &icfg, &times)?;

    let m = cfg.mass;
    let var_v0 = rec.var_p[0] / (m * m);
    let mean_v0 = rec.mean_p[0] / m;
    let eta = setup.eta()?;
    let d_v = setup.d_v();
    let var_inf = if eta > 0.0 { d_v / eta } else { var_v0 };
    let half_width = setup.fp_width * var_v0.max(var_inf).sqrt() + mean_v0.abs();
    let grid = matched_gaussian(-half_width, half_width, setup.fp_cells, mean_v0, var_v0)?;
    let classical = variance_at_times(&grid, eta, d_v, &rec.times, f64::INFINITY)?;

    let var_p_classical: Vec<f64> = classical.iter().map(|v| v * m * m).collect();
    let rel_diff: Vec<f64> = rec
        .var_p
        .iter()
        .zip(&var_p_classical)
        .map(|(q, c)| (q - c).abs() / c.abs())
        .collect();
    let max_rel_diff = rel_diff.iter().copied().fold(0.0, f64::max);
    Ok(RelaxationComparison {
        times: rec.times.clone(),
        var_p_quantum: rec.var_p.clone(),
        var_p_classical,
        rel_diff,
        max_rel_diff,
        trace_drift: rec.trace_drift(),
        hermiticity_drift: rec.max_hermiticity_defect(),
    })
}
