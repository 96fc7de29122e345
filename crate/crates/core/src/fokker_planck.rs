// SPDX-License-Identifier: Apache-2.0

//! Explicit finite-volume solver for the velocity-space Fokker–Planck equation
//!
//! ```text
//! ∂p/∂t = η ∂/∂v [v p] + D_v ∂²p/∂v²
//! ```
//!
//! Fluxes use Chang–Cooper weighting, so the sampled Maxwell distribution
//! `exp(−ηv²/2D_v)` is an exact discrete stationary state and the update
//! stays non-negative under the step bound. Boundaries carry zero flux.

use crate::{Error, Result};

/// Cell-centred probability density on `[v_min, v_max]`.
#[derive(Debug, Clone, PartialEq)]
pub struct FPGrid {
    pub v_min: f64,
    pub v_max: f64,
    pub p: Vec<f64>,
}

impl FPGrid {
    /// Samples `f` at cell centres and normalizes to unit mass.
    pub fn from_fn(v_min: f64, v_max: f64, n_cells: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        if !(v_min.is_finite() && v_max.is_finite() && v_min < 0.0 && 0.0 < v_max) {
            return Err(Error::param("v_range", format!("need v_min < 0 < v_max, got [{v_min}, {v_max}]")));
        }
        if n_cells < 3 {
            return Err(Error::param("n_cells", format!("{n_cells} < 3")));
        }
        let mut grid = Self {
            v_min,
            v_max,
            p: vec![0.0; n_cells],
        };
        for i in 0..n_cells {
            grid.p[i] = f(grid.center(i));
        }
        if grid.p.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::param("p", "initial density must be finite and non-negative"));
        }
        let mass = grid.mass();
        if mass <= 0.0 {
            return Err(Error::param("p", "initial density has zero mass"));
        }
        grid.p.iter_mut().for_each(|v| *v /= mass);
        Ok(grid)
    }

    /// Normal density with the given mean and variance.
    pub fn gaussian(v_min: f64, v_max: f64, n_cells: usize, mean: f64, var: f64) -> Result<Self> {
        if !(var.is_finite() && var > 0.0) {
            return Err(Error::param("var", format!("{var} is not positive")));
        }
        Self::from_fn(v_min, v_max, n_cells, |v| (-(v - mean) * (v - mean) / (2.0 * var)).exp())
    }

    /// Symmetric grid `[−v_max, v_max]` holding the stationary Maxwell density.
    pub fn maxwell(v_max: f64, n_cells: usize, eta: f64, d_v: f64) -> Result<Self> {
        Self::gaussian(-v_max, v_max, n_cells, 0.0, d_v / eta)
    }

    pub fn n_cells(&self) -> usize {
        self.p.len()
    }

    pub fn dv(&self) -> f64 {
        (self.v_max - self.v_min) / self.p.len() as f64
    }

    pub fn center(&self, i: usize) -> f64 {
        self.v_min + (i as f64 + 0.5) * self.dv()
    }

    /// Left face of cell `i` (face `n_cells` is the right boundary).
    pub fn face(&self, i: usize) -> f64 {
        self.v_min + i as f64 * self.dv()
    }

    pub fn mass(&self) -> f64 {
        self.p.iter().sum::<f64>() * self.dv()
    }

    pub fn mean(&self) -> f64 {
        let dv = self.dv();
        self.p.iter().enumerate().map(|(i, p)| self.center(i) * p * dv).sum::<f64>() / self.mass()
    }

    pub fn variance(&self) -> f64 {
        let dv = self.dv();
        let mean = self.mean();
        self.p
            .iter()
            .enumerate()
            .map(|(i, p)| (self.center(i) - mean).powi(2) * p * dv)
            .sum::<f64>()
            / self.mass()
    }
}

/// Chang–Cooper weight `δ(w) = 1/w − 1/(e^w − 1)` with `w = η v Δv / D`.
fn chang_cooper_delta(eta: f64, v: f64, dv: f64, d_v: f64) -> f64 {
    if d_v == 0.0 {
        // pure drift: upwind toward the origin
        return match (eta * v).partial_cmp(&0.0) {
            Some(std::cmp::Ordering::Greater) => 0.0,
            Some(std::cmp::Ordering::Less) => 1.0,
            _ => 0.5,
        };
    }
    let w = eta * v * dv / d_v;
    if w.abs() < 1e-4 {
        0.5 - w / 12.0 + w * w * w / 720.0
    } else {
        1.0 / w - 1.0 / w.exp_m1()
    }
}

/// Largest admissible explicit step, `0.4 min(Δv²/2D, Δv/(η |v|_max))`.
pub fn stability_bound(grid: &FPGrid, eta: f64, d_v: f64) -> f64 {
    let dv = grid.dv();
    let vmax = grid.v_min.abs().max(grid.v_max.abs());
    let diffusive = if d_v > 0.0 { dv * dv / (2.0 * d_v) } else { f64::INFINITY };
    let drift = if eta > 0.0 { dv / (eta * vmax) } else { f64::INFINITY };
    0.4 * diffusive.min(drift)
}

fn check_coefficients(eta: f64, d_v: f64) -> Result<()> {
    if !(eta.is_finite() && eta >= 0.0) {
        return Err(Error::param("eta", format!("{eta} is not a non-negative number")));
    }
    if !(d_v.is_finite() && d_v >= 0.0) {
        return Err(Error::param("d_v", format!("{d_v} is not a non-negative number")));
    }
    Ok(())
}

/// Advances the density by one explicit step of length `dt`.
pub fn fp_step(grid: &FPGrid, eta: f64, d_v: f64, dt: f64) -> Result<FPGrid> {
    check_coefficients(eta, d_v)?;
    let bound = stability_bound(grid, eta, d_v);
    if !(dt > 0.0 && dt <= bound) {
        return Err(Error::StabilityBound { dt, bound });
    }
    Ok(step_unchecked(grid, eta, d_v, dt))
}

fn step_unchecked(grid: &FPGrid, eta: f64, d_v: f64, dt: f64) -> FPGrid {
    let n = grid.n_cells();
    let dv = grid.dv();
    let p = &grid.p;
    // flux[i] is J at face i; faces 0 and n are walls.
    let mut flux = vec![0.0; n + 1];
    for i in 1..n {
        let v = grid.face(i);
        let delta = chang_cooper_delta(eta, v, dv, d_v);
        flux[i] = eta * v * ((1.0 - delta) * p[i] + delta * p[i - 1]) + d_v * (p[i] - p[i - 1]) / dv;
    }
    let ratio = dt / dv;
    let next = (0..n).map(|i| p[i] + ratio * (flux[i + 1] - flux[i])).collect();
    FPGrid {
        v_min: grid.v_min,
        v_max: grid.v_max,
        p: next,
    }
}

/// Moment history of a Fokker–Planck run.
#[derive(Debug, Clone, PartialEq)]
pub struct FpSolution {
    pub grid: FPGrid,
    pub times: Vec<f64>,
    pub mass: Vec<f64>,
    pub mean: Vec<f64>,
    pub var: Vec<f64>,
}

/// Repeated [`fp_step`] up to `t_final`; the step is shrunk to divide the
/// interval, and moments are recorded every `record_every` steps and at the end.
pub fn fp_solve(
    grid: &FPGrid,
    eta: f64,
    d_v: f64,
    t_final: f64,
    dt: f64,
    record_every: usize,
) -> Result<FpSolution> {
    check_coefficients(eta, d_v)?;
    if !(t_final.is_finite() && t_final > 0.0) {
        return Err(Error::param("t_final", format!("{t_final} is not positive")));
    }
    if record_every == 0 {
        return Err(Error::param("record_every", "must be at least 1"));
    }
    let bound = stability_bound(grid, eta, d_v);
    if !(dt > 0.0 && dt <= bound) {
        return Err(Error::StabilityBound { dt, bound });
    }
    let steps = ((t_final / dt) - 1e-9).ceil().max(1.0) as usize;
    let h = t_final / steps as f64;
    let mut sol = FpSolution {
        grid: grid.clone(),
        times: vec![0.0],
        mass: vec![grid.mass()],
        mean: vec![grid.mean()],
        var: vec![grid.variance()],
    };
    for k in 1..=steps {
        sol.grid = step_unchecked(&sol.grid, eta, d_v, h);
        if k % record_every == 0 || k == steps {
            sol.times.push(if k == steps { t_final } else { k as f64 * h });
            sol.mass.push(sol.grid.mass());
            sol.mean.push(sol.grid.mean());
            sol.var.push(sol.grid.variance());
        }
    }
    Ok(sol)
}

/// Advances to each requested time in turn, returning the variance there.
/// Used to sample the classical solution on another solver's time grid.
pub fn variance_at_times(
    grid: &FPGrid,
    eta: f64,
    d_v: f64,
    times: &[f64],
    dt_max: f64,
) -> Result<Vec<f64>> {
    check_coefficients(eta, d_v)?;
    let bound = stability_bound(grid, eta, d_v);
    let dt_max = dt_max.min(bound);
    let mut g = grid.clone();
    let mut t = 0.0;
    let mut out = Vec::with_capacity(times.len());
    for &target in times {
        if target < t {
            return Err(Error::param("times", "must be non-decreasing"));
        }
        let span = target - t;
        if span > 0.0 {
            let steps = (span / dt_max).ceil().max(1.0) as usize;
            let h = span / steps as f64;
            for _ in 0..steps {
                g = step_unchecked(&g, eta, d_v, h);
            }
        }
        t = target;
        out.push(g.variance());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn maxwell_is_stationary() {
        let (eta, d) = (1.3_f64, 0.7);
        let sigma = (d / eta).sqrt();
        let g = FPGrid::maxwell(8.0 * sigma, 200, eta, d).unwrap();
        let dt = stability_bound(&g, eta, d);
        let next = fp_step(&g, eta, d, dt).unwrap();
        let change = g.p.iter().zip(&next.p).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(change < 1e-10, "{change}");
    }

    #[test]
    fn mass_is_conserved_per_step() {
        let g = FPGrid::gaussian(-5.0, 5.0, 150, 1.0, 0.3).unwrap();
        let dt = stability_bound(&g, 2.0, 0.5);
        let mut cur = g;
        for _ in 0..50 {
            let next = fp_step(&cur, 2.0, 0.5, dt).unwrap();
            assert!((next.mass() - cur.mass()).abs() < 1e-14);
            assert!(next.p.iter().all(|&v| v >= -1e-15));
            cur = next;
        }
    }

    #[test]
    fn pure_diffusion_variance_grows_linearly() {
        let d = 0.5;
        let g = FPGrid::gaussian(-12.0, 12.0, 400, 0.0, 0.5).unwrap();
        let dt = stability_bound(&g, 0.0, d);
        let sol = fp_solve(&g, 0.0, d, 2.0, dt, 10).unwrap();
        let grown = sol.var.last().unwrap() - sol.var[0];
        assert_relative_eq!(grown, 2.0 * d * 2.0, max_relative = 5e-3);
    }

    #[test]
    fn stationary_variance_follows_einstein_relation() {
        // D_v = η / (Mβ)
        let (eta, mass, beta) = (0.8_f64, 2.0, 1.5);
        let d = eta / (mass * beta);
        let target = 1.0 / (mass * beta);
        let vmax = 8.0 * target.sqrt();
        let g = FPGrid::gaussian(-vmax, vmax, 400, 0.3, 4.0 * target).unwrap();
        let dt = stability_bound(&g, eta, d);
        let sol = fp_solve(&g, eta, d, 12.0 / eta, dt, 1000).unwrap();
        assert_relative_eq!(*sol.var.last().unwrap(), target, max_relative = 5e-3);
    }

    #[test]
    fn step_bound_is_enforced() {
        let g = FPGrid::gaussian(-3.0, 3.0, 60, 0.0, 0.5).unwrap();
        let bound = stability_bound(&g, 1.0, 1.0);
        assert!(matches!(fp_step(&g, 1.0, 1.0, 1.01 * bound), Err(Error::StabilityBound { .. })));
        assert!(FPGrid::gaussian(0.0, 3.0, 60, 0.0, 0.5).is_err());
        assert!(fp_step(&g, -1.0, 1.0, bound).is_err());
    }

    #[test]
    fn pure_drift_upwinds() {
        let g = FPGrid::gaussian(-4.0, 4.0, 100, 1.0, 0.2).unwrap();
        let dt = stability_bound(&g, 1.0, 0.0);
        let sol = fp_solve(&g, 1.0, 0.0, 0.5, dt, 1).unwrap();
        assert!(sol.grid.p.iter().all(|&v| v >= 0.0));
        assert!(sol.mean.last().unwrap() < &sol.mean[0]);
    }

    #[test]
    fn frozen_dynamics() {
        let g = FPGrid::gaussian(-4.0, 4.0, 50, 0.3, 0.4).unwrap();
        let v = variance_at_times(&g, 0.0, 0.0, &[0.0, 1.0, 2.0], 0.1).unwrap();
        assert!(v.iter().all(|&x| x == v[0]));
    }
}
