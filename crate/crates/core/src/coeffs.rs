// SPDX-License-Identifier: Apache-2.0

//! Microphysical diffusion and friction coefficients, complete-positivity
//! constraints, and the statistics dependence of friction.

use std::f64::consts::PI;

use crate::operators::thermal_wavelength;
use crate::quadrature::{integrate, Tolerance};
use crate::structure_factor::{GasThermodynamics, Statistics};
use crate::{Error, Result};

/// Model for the squared modulus of the Fourier-transformed collision T matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TMatrixModel {
    /// `|t̃(q)|² = t0²`
    Constant { t0: f64 },
    /// `|t̃(q)|² = t0² exp(−q²/σ²)`
    Gaussian { t0: f64, sigma_q: f64 },
}

impl TMatrixModel {
    pub fn validate(&self) -> Result<()> {
        match *self {
            TMatrixModel::Constant { t0 } if t0.is_finite() => Ok(()),
            TMatrixModel::Gaussian { t0, sigma_q }
                if t0.is_finite() && sigma_q.is_finite() && sigma_q > 0.0 =>
            {
                Ok(())
            }
            _ => Err(Error::param("tmatrix", format!("invalid model {self:?}"))),
        }
    }

    /// `|t̃(q)|²`.
    pub fn squared(&self, q: f64) -> f64 {
        match *self {
            TMatrixModel::Constant { t0 } => t0 * t0,
            TMatrixModel::Gaussian { t0, sigma_q } => t0 * t0 * (-(q * q) / (sigma_q * sigma_q)).exp(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Provenance {
    User,
    Microphysical {
        tmatrix: TMatrixModel,
        gas: GasThermodynamics,
        mass: f64,
    },
}

/// Coefficients of the bilinear master equation.
///
/// For microphysical sets `mu` is the `{x, p}` Hamiltonian shift that the
/// single-generator form absorbs, `D_pp λ_M² / 4ħ²` per unit fugacity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoefficientSet {
    pub d_pp: f64,
    pub d_xx: f64,
    pub d_xp: f64,
    pub gamma: f64,
    pub mu: f64,
    pub provenance: Provenance,
}

impl CoefficientSet {
    pub fn user(d_pp: f64, d_xx: f64, d_xp: f64, gamma: f64, mu: f64) -> Result<Self> {
        let c = Self {
            d_pp,
            d_xx,
            d_xp,
            gamma,
            mu,
            provenance: Provenance::User,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("d_pp", self.d_pp),
            ("d_xx", self.d_xx),
            ("d_xp", self.d_xp),
            ("gamma", self.gamma),
            ("mu", self.mu),
        ] {
            if !v.is_finite() {
                return Err(Error::param(name, format!("{v} is not finite")));
            }
        }
        for (name, v) in [("d_pp", self.d_pp), ("d_xx", self.d_xx), ("gamma", self.gamma)] {
            if v < 0.0 {
                return Err(Error::param(name, format!("{v} is negative")));
            }
        }
        Ok(())
    }

    /// Sets `D_xx = (βħ/4M)² D_pp`, `γ = (β/2M) D_pp`, `D_xp = 0` and the matching `μ`.
    pub fn from_momentum_diffusion(d_pp: f64, beta: f64, mass: f64, hbar: f64) -> Result<Self> {
        if !(d_pp.is_finite() && d_pp >= 0.0) {
            return Err(Error::param("d_pp", format!("{d_pp} is not a non-negative number")));
        }
        for (name, v) in [("beta", beta), ("mass", mass), ("hbar", hbar)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::param(name, format!("{v} is not a positive number")));
            }
        }
        let r = beta * hbar / (4.0 * mass);
        let lambda = thermal_wavelength(hbar, beta, mass);
        Ok(Self {
            d_pp,
            d_xx: r * r * d_pp,
            d_xp: 0.0,
            gamma: beta / (2.0 * mass) * d_pp,
            mu: d_pp * lambda * lambda / (4.0 * hbar * hbar),
            provenance: Provenance::User,
        })
    }
}

/// Radial cutoff `12 sqrt(8m/β)`: the Boltzmann factor is below `e^{-144}` there.
pub fn radial_cutoff(gas: &GasThermodynamics) -> f64 {
    12.0 * (8.0 * gas.gas_mass / gas.beta).sqrt()
}

/// Momentum diffusion `D_pp = (2/3)(π²m²/βħ) ∫d³q |t̃(q)|² q e^{−βq²/8m}`
/// together with the coefficients it fixes.
pub fn compute_dpp(
    tmatrix: &TMatrixModel,
    gas: &GasThermodynamics,
    mass: f64,
    hbar: f64,
) -> Result<CoefficientSet> {
    tmatrix.validate()?;
    gas.validate()?;
    let alpha = gas.beta / (8.0 * gas.gas_mass);
    let tol = Tolerance {
        abs: 0.0,
        rel: 1e-12,
        max_intervals: 500,
    };
    let radial = integrate(
        |q| q * q * q * tmatrix.squared(q) * (-alpha * q * q).exp(),
        0.0,
        radial_cutoff(gas),
        tol,
    )?;
    let m = gas.gas_mass;
    let d_pp = 2.0 / 3.0 * (PI * PI * m * m / (gas.beta * hbar)) * 4.0 * PI * radial.value;
    let mut set = CoefficientSet::from_momentum_diffusion(d_pp, gas.beta, mass, hbar)?;
    set.provenance = Provenance::Microphysical {
        tmatrix: *tmatrix,
        gas: *gas,
        mass,
    };
    Ok(set)
}

/// Outcome of the complete-positivity test, carrying the signed margin
/// `D_xx D_pp − D_xp² − (γħ/2)²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CpStatus {
    Satisfied { margin: f64 },
    Violated { margin: f64 },
}

impl CpStatus {
    pub fn margin(&self) -> f64 {
        match *self {
            CpStatus::Satisfied { margin } | CpStatus::Violated { margin } => margin,
        }
    }

    pub fn is_satisfied(&self) -> bool {
        matches!(self, CpStatus::Satisfied { .. })
    }
}

/// Relative slack granted to a saturated bound.
const SATURATION_TOL: f64 = 1e-12;

pub fn cp_check(c: &CoefficientSet, hbar: f64) -> CpStatus {
    let bound = (c.gamma * hbar / 2.0).powi(2);
    let margin = c.d_xx * c.d_pp - c.d_xp * c.d_xp - bound;
    let positive = c.d_pp > 0.0 && c.d_xx > 0.0;
    if positive && margin >= -SATURATION_TOL * bound {
        CpStatus::Satisfied { margin }
    } else {
        CpStatus::Violated { margin }
    }
}

/// `χ = D_xx M / (βħ²γ)`; complete positivity of the minimal form needs `χ ≥ 1/8`.
pub fn chi_of(c: &CoefficientSet, gas: &GasThermodynamics, mass: f64, hbar: f64) -> Result<f64> {
    if c.gamma == 0.0 {
        return Err(Error::param("gamma", "chi is undefined for zero friction"));
    }
    Ok(c.d_xx * mass / (gas.beta * hbar * hbar * c.gamma))
}

/// `γ_MB / γ_stat`: `1 − z` for Bose, `1 + z` for Fermi, 1 otherwise.
pub fn friction_ratio(gas: &GasThermodynamics) -> Result<f64> {
    gas.validate()?;
    Ok(match gas.statistics {
        Statistics::MaxwellBoltzmann => 1.0,
        Statistics::Bose => 1.0 - gas.fugacity,
        Statistics::Fermi => 1.0 + gas.fugacity,
    })
}
