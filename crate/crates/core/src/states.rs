// SPDX-License-Identifier: Apache-2.0

//! Initial states in the truncated basis.

use nalgebra::DVector;

use crate::operators::{
    build_momentum, build_position, hermitian_eigen, hermitian_function, DensityMatrix,
    HilbertConfig,
};
use crate::{CMatrix, Complex64, Error, Result};

/// Pure Gaussian wave packet with the given means and position variance.
///
/// The momentum variance is `ħ² / (4 var_x)`. The packet is the ground state of
/// the truncated quadratic form `p² + (ħ/2var_x)² x²`, displaced by
/// `exp((i/ħ)(p0 x − x0 p))`. Both steps use truncated matrices only.
pub fn gaussian_state(
    cfg: &HilbertConfig,
    mean_x: f64,
    mean_p: f64,
    var_x: f64,
) -> Result<DensityMatrix> {
    if !(var_x.is_finite() && var_x > 0.0) {
        return Err(Error::param("var_x", format!("{var_x} is not a positive number")));
    }
    let x = build_position(cfg).into_matrix();
    let p = build_momentum(cfg).into_matrix();
    let k = cfg.hbar / (2.0 * var_x);
    let quad = &p * &p + &x * &x * Complex64::from(k * k);
    let (_, vecs) = hermitian_eigen(&quad)?;
    let ground: DVector<Complex64> = vecs.column(0).into_owned();

    let generator = &x * Complex64::from(mean_p) - &p * Complex64::from(mean_x);
    let hbar = cfg.hbar;
    let shift = hermitian_function(&generator, |l| Complex64::new(0.0, l / hbar).exp())?;
    DensityMatrix::pure(&(shift * ground))
}

/// Gaussian packet whose widths match the basis oscillator ground state.
pub fn coherent_state(cfg: &HilbertConfig, mean_x: f64, mean_p: f64) -> Result<DensityMatrix> {
    gaussian_state(cfg, mean_x, mean_p, cfg.hbar / (2.0 * cfg.mass * cfg.omega_basis))
}

/// `exp(−βH) / Tr exp(−βH)` for a Hermitian `h`.
pub fn thermal_state(h: &CMatrix, beta: f64) -> Result<DensityMatrix> {
    if !(beta.is_finite() && beta > 0.0) {
        return Err(Error::param("beta", format!("{beta} is not a positive number")));
    }
    let (values, _) = hermitian_eigen(h)?;
    let e0 = values.first().copied().unwrap_or(0.0);
    let m = hermitian_function(h, |e| Complex64::from((-beta * (e - e0)).exp()))?;
    DensityMatrix::from_matrix_normalized(m)
}
