// SPDX-License-Identifier: Apache-2.0

//! Dynamic structure factor of the ideal Maxwell–Boltzmann gas.
//!
//! `E` is the energy absorbed by the gas, so the peak sits at the recoil
//! energy `q²/2m` and detailed balance reads `S(q, −E) = e^{−βE} S(q, E)`.

use crate::quadrature::{integrate, Tolerance};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Statistics {
    MaxwellBoltzmann,
    Bose,
    Fermi,
}

/// Thermodynamic state of the background gas.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GasThermodynamics {
    pub beta: f64,
    pub gas_mass: f64,
    pub fugacity: f64,
    pub statistics: Statistics,
}

impl GasThermodynamics {
    pub fn new(beta: f64, gas_mass: f64, fugacity: f64, statistics: Statistics) -> Result<Self> {
        let gas = Self {
            beta,
            gas_mass,
            fugacity,
            statistics,
        };
        gas.validate()?;
        Ok(gas)
    }

    pub fn maxwell_boltzmann(beta: f64, gas_mass: f64) -> Result<Self> {
        Self::new(beta, gas_mass, 1.0, Statistics::MaxwellBoltzmann)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("beta", self.beta),
            ("gas_mass", self.gas_mass),
            ("fugacity", self.fugacity),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::param(name, format!("{v} is not a positive number")));
            }
        }
        if self.statistics == Statistics::Bose && self.fugacity >= 1.0 {
            return Err(Error::param(
                "fugacity",
                format!("Bose gas requires z < 1, got {}", self.fugacity),
            ));
        }
        Ok(())
    }

    /// Standard deviation of the energy transfer at momentum transfer `q`.
    fn energy_width(&self, q: f64) -> f64 {
        q / (self.beta * self.gas_mass).sqrt()
    }

    fn recoil(&self, q: f64) -> f64 {
        q * q / (2.0 * self.gas_mass)
    }
}

fn check_q(q: f64) -> Result<()> {
    if q.is_finite() && q > 0.0 {
        Ok(())
    } else {
        Err(Error::param("q", format!("{q} is not a positive momentum")))
    }
}

/// `S(q, E) = sqrt(βm / 2πq²) exp(−(βm / 2q²)(E − q²/2m)²)`.
pub fn s_mb(q: f64, energy: f64, gas: &GasThermodynamics) -> Result<f64> {
    check_q(q)?;
    if gas.statistics != Statistics::MaxwellBoltzmann {
        return Err(Error::param(
            "statistics",
            "closed-form structure factor is Maxwell-Boltzmann only",
        ));
    }
    let bm = gas.beta * gas.gas_mass;
    let shift = energy - gas.recoil(q);
    Ok((bm / (2.0 * std::f64::consts::PI * q * q)).sqrt() * (-bm * shift * shift / (2.0 * q * q)).exp())
}

// Beyond ±40 widths the Gaussian is below e^{-800}.
const WIDTHS: f64 = 40.0;

fn energy_moment(q: f64, gas: &GasThermodynamics, power: i32) -> Result<f64> {
    check_q(q)?;
    s_mb(q, 0.0, gas)?;
    let center = gas.recoil(q);
    let width = gas.energy_width(q);
    let tol = Tolerance {
        abs: 0.0,
        rel: 1e-13,
        max_intervals: 400,
    };
    // Split at the peak so both halves see a monotone tail.
    let f = |e: f64| e.powi(power) * s_mb(q, e, gas).unwrap_or(f64::NAN);
    let lo = integrate(f, center - WIDTHS * width, center, tol)?;
    let hi = integrate(f, center, center + WIDTHS * width, tol)?;
    Ok(lo.value + hi.value)
}

/// `∫ S(q, E) dE`, equal to one for the ideal gas.
pub fn sum_rule_zeroth(q: f64, gas: &GasThermodynamics) -> Result<f64> {
    energy_moment(q, gas, 0)
}

/// `∫ E S(q, E) dE`, equal to the recoil energy `q²/2m`.
pub fn sum_rule_f(q: f64, gas: &GasThermodynamics) -> Result<f64> {
    energy_moment(q, gas, 1)
}

/// Fugacity dependence of the dissipator: `z`, `z/(1−z)` or `z/(1+z)`.
pub fn statistics_prefactor(gas: &GasThermodynamics) -> Result<f64> {
    gas.validate()?;
    let z = gas.fugacity;
    Ok(match gas.statistics {
        Statistics::MaxwellBoltzmann => z,
        Statistics::Bose => z / (1.0 - z),
        Statistics::Fermi => z / (1.0 + z),
    })
}
