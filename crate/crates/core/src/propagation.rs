// SPDX-License-Identifier: Apache-2.0

//! Time integration of `dρ/dt = L[ρ]` with state monitors.
//!
//! The integrators never renormalize the trace or project onto positive
//! matrices: trace drift and negative eigenvalues are measured, not masked.

use crate::liouvillian::{apply_superoperator, Liouvillian};
use crate::operators::{
    build_momentum, build_position, expectation, hermitian_defect, max_abs, min_eigenvalue,
    DensityMatrix, HilbertConfig,
};
use crate::{CMatrix, Complex64, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Method {
    /// Classical fourth-order Runge–Kutta; the step is shrunk so that it
    /// divides `t_final` exactly.
    Rk4Fixed { dt: f64 },
    /// Dormand–Prince 5(4) with a max-norm error controller.
    Rk45Adaptive { rtol: f64, atol: f64, dt_init: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorConfig {
    pub method: Method,
    pub t_final: f64,
    /// Monitors are sampled every `monitor_stride` accepted steps, plus at
    /// both ends of the run.
    pub monitor_stride: usize,
}

impl IntegratorConfig {
    pub fn rk45(t_final: f64, rtol: f64, monitor_stride: usize) -> Self {
        Self {
            method: Method::Rk45Adaptive {
                rtol,
                atol: rtol * 1e-2,
                dt_init: 1e-3,
            },
            t_final,
            monitor_stride,
        }
    }

    /// Replaces the first trial step of an adaptive method.
    pub fn with_dt_init(mut self, dt: f64) -> Self {
        if let Method::Rk45Adaptive { ref mut dt_init, .. } = self.method {
            *dt_init = dt;
        }
        self
    }

    pub fn rk4(t_final: f64, dt: f64, monitor_stride: usize) -> Self {
        Self {
            method: Method::Rk4Fixed { dt },
            t_final,
            monitor_stride,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t_final.is_finite() && self.t_final > 0.0) {
            return Err(Error::param("t_final", format!("{} is not positive", self.t_final)));
        }
        if self.monitor_stride == 0 {
            return Err(Error::param("monitor_stride", "must be at least 1"));
        }
        match self.method {
            Method::Rk4Fixed { dt } if !(dt.is_finite() && dt > 0.0) => {
                Err(Error::param("dt", format!("{dt} is not positive")))
            }
            Method::Rk45Adaptive { rtol, atol, dt_init }
                if !(rtol > 0.0 && atol > 0.0 && dt_init > 0.0) =>
            {
                Err(Error::param("rtol", "tolerances and dt_init must be positive"))
            }
            _ => Ok(()),
        }
    }
}

/// Monitor time series of one propagation.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryRecord {
    pub times: Vec<f64>,
    pub trace: Vec<f64>,
    pub min_eig: Vec<f64>,
    pub purity: Vec<f64>,
    pub mean_x: Vec<f64>,
    pub mean_p: Vec<f64>,
    pub var_x: Vec<f64>,
    pub var_p: Vec<f64>,
    /// `max |ρ − ρ†|` at each sample.
    pub hermiticity: Vec<f64>,
    /// Final state as integrated, possibly not positive.
    pub final_state: CMatrix,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
}

impl TrajectoryRecord {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Largest `|Tr ρ(t) − Tr ρ(0)|`.
    pub fn trace_drift(&self) -> f64 {
        let t0 = self.trace.first().copied().unwrap_or(1.0);
        self.trace.iter().fold(0.0_f64, |m, t| m.max((t - t0).abs()))
    }

    pub fn max_hermiticity_defect(&self) -> f64 {
        self.hermiticity.iter().copied().fold(0.0, f64::max)
    }
}

struct Monitors {
    x: CMatrix,
    p: CMatrix,
    x2: CMatrix,
    p2: CMatrix,
}

impl Monitors {
    fn new(cfg: &HilbertConfig) -> Self {
        let x = build_position(cfg).into_matrix();
        let p = build_momentum(cfg).into_matrix();
        let x2 = &x * &x;
        let p2 = &p * &p;
        Self { x, p, x2, p2 }
    }

    fn record(&self, rec: &mut TrajectoryRecord, t: f64, rho: &CMatrix) -> Result<()> {
        let ev = |a: &CMatrix| expectation(rho, a).map(|z| z.re);
        let (mx, mp) = (ev(&self.x)?, ev(&self.p)?);
        rec.times.push(t);
        rec.trace.push(rho.trace().re);
        rec.min_eig.push(min_eigenvalue(rho)?);
        rec.purity.push(expectation(rho, rho)?.re);
        rec.mean_x.push(mx);
        rec.mean_p.push(mp);
        rec.var_x.push(ev(&self.x2)? - mx * mx);
        rec.var_p.push(ev(&self.p2)? - mp * mp);
        rec.hermiticity.push(hermitian_defect(rho));
        Ok(())
    }
}

fn axpy(y: &CMatrix, terms: &[(f64, &CMatrix)]) -> CMatrix {
    let mut out = y.clone();
    for (c, k) in terms {
        if *c != 0.0 {
            out.zip_apply(*k, |o, kv| *o += kv * *c);
        }
    }
    out
}

fn check_finite(rho: &CMatrix) -> Result<()> {
    if rho.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite("propagated state"))
    }
}

fn rk4_step(l: &dyn Liouvillian, y: &CMatrix, h: f64) -> CMatrix {
    let k1 = l.apply(y);
    let k2 = l.apply(&axpy(y, &[(0.5 * h, &k1)]));
    let k3 = l.apply(&axpy(y, &[(0.5 * h, &k2)]));
    let k4 = l.apply(&axpy(y, &[(h, &k3)]));
    axpy(y, &[(h / 6.0, &k1), (h / 3.0, &k2), (h / 3.0, &k3), (h / 6.0, &k4)])
}

// Dormand–Prince 5(4) tableau.
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// b - b̂ (fifth minus embedded fourth order weights)
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const SAFETY: f64 = 0.9;
const MIN_FACTOR: f64 = 0.2;
const MAX_FACTOR: f64 = 5.0;

/// One Dormand–Prince attempt. Returns the fifth-order solution, its
/// derivative (reused as the next `k1`) and the scaled error norm.
fn dopri_step(
    l: &dyn Liouvillian,
    y: &CMatrix,
    k1: &CMatrix,
    h: f64,
    rtol: f64,
    atol: f64,
) -> (CMatrix, CMatrix, f64) {
    let k2 = l.apply(&axpy(y, &[(h * A21, k1)]));
    let k3 = l.apply(&axpy(y, &[(h * A31, k1), (h * A32, &k2)]));
    let k4 = l.apply(&axpy(y, &[(h * A41, k1), (h * A42, &k2), (h * A43, &k3)]));
    let k5 = l.apply(&axpy(
        y,
        &[(h * A51, k1), (h * A52, &k2), (h * A53, &k3), (h * A54, &k4)],
    ));
    let k6 = l.apply(&axpy(
        y,
        &[
            (h * A61, k1),
            (h * A62, &k2),
            (h * A63, &k3),
            (h * A64, &k4),
            (h * A65, &k5),
        ],
    ));
    let y_new = axpy(
        y,
        &[(h * B1, k1), (h * B3, &k3), (h * B4, &k4), (h * B5, &k5), (h * B6, &k6)],
    );
    let k7 = l.apply(&y_new);
    let zero = CMatrix::zeros(y.nrows(), y.ncols());
    let err = axpy(
        &zero,
        &[
            (h * E1, k1),
            (h * E3, &k3),
            (h * E4, &k4),
            (h * E5, &k5),
            (h * E6, &k6),
            (h * E7, &k7),
        ],
    );
    let mut norm = 0.0_f64;
    for ((e, a), b) in err.iter().zip(y.iter()).zip(y_new.iter()) {
        let scale = atol + rtol * a.norm().max(b.norm());
        norm = norm.max(e.norm() / scale);
    }
    (y_new, k7, norm)
}

/// Integrates from `rho0` to `icfg.t_final`.
pub fn propagate(
    rho0: &DensityMatrix,
    l: &dyn Liouvillian,
    cfg: &HilbertConfig,
    icfg: &IntegratorConfig,
) -> Result<TrajectoryRecord> {
    icfg.validate()?;
    run(rho0, l, cfg, icfg, &[icfg.t_final], true)
}

/// Integrates to `icfg.t_final`, landing exactly on each of `times` and
/// recording monitors only there (and at `t = 0`). `times` must be strictly
/// increasing within `(0, t_final]`.
pub fn propagate_sampled(
    rho0: &DensityMatrix,
    l: &dyn Liouvillian,
    cfg: &HilbertConfig,
    icfg: &IntegratorConfig,
    times: &[f64],
) -> Result<TrajectoryRecord> {
    icfg.validate()?;
    let increasing = times.windows(2).all(|w| w[0] < w[1]);
    let in_range = times.iter().all(|&t| t > 0.0 && t <= icfg.t_final);
    if times.is_empty() || !increasing || !in_range {
        return Err(Error::param(
            "times",
            "sample times must be strictly increasing within (0, t_final]",
        ));
    }
    let mut stops = times.to_vec();
    if *stops.last().expect("non-empty") < icfg.t_final {
        stops.push(icfg.t_final);
    }
    let mut rec = run(rho0, l, cfg, icfg, &stops, false)?;
    if stops.len() > times.len() {
        // drop the unrequested final sample
        for v in [
            &mut rec.times,
            &mut rec.trace,
            &mut rec.min_eig,
            &mut rec.purity,
            &mut rec.mean_x,
            &mut rec.mean_p,
            &mut rec.var_x,
            &mut rec.var_p,
            &mut rec.hermiticity,
        ] {
            v.pop();
        }
    }
    Ok(rec)
}

fn run(
    rho0: &DensityMatrix,
    l: &dyn Liouvillian,
    cfg: &HilbertConfig,
    icfg: &IntegratorConfig,
    stops: &[f64],
    stride_monitors: bool,
) -> Result<TrajectoryRecord> {
    if rho0.dim() != l.dim() || cfg.dim != l.dim() {
        return Err(Error::DimensionMismatch {
            expected: l.dim(),
            got: rho0.dim(),
        });
    }
    let monitors = Monitors::new(cfg);
    let mut rec = TrajectoryRecord {
        times: Vec::new(),
        trace: Vec::new(),
        min_eig: Vec::new(),
        purity: Vec::new(),
        mean_x: Vec::new(),
        mean_p: Vec::new(),
        var_x: Vec::new(),
        var_p: Vec::new(),
        hermiticity: Vec::new(),
        final_state: CMatrix::zeros(0, 0),
        accepted_steps: 0,
        rejected_steps: 0,
    };
    let mut y = rho0.matrix().clone();
    let mut t = 0.0;
    monitors.record(&mut rec, t, &y)?;
    let t_end = icfg.t_final;
    let mut since_monitor = 0;

    match icfg.method {
        Method::Rk4Fixed { dt } => {
            for &stop in stops {
                let span = stop - t;
                let n = ((span / dt) - 1e-9).ceil().max(1.0) as usize;
                let h = span / n as f64;
                let t0 = t;
                for step in 1..=n {
                    y = rk4_step(l, &y, h);
                    check_finite(&y)?;
                    t = if step == n { stop } else { t0 + step as f64 * h };
                    rec.accepted_steps += 1;
                    since_monitor += 1;
                    let strided = stride_monitors && since_monitor == icfg.monitor_stride;
                    if strided || step == n {
                        monitors.record(&mut rec, t, &y)?;
                        since_monitor = 0;
                    }
                }
            }
        }
        Method::Rk45Adaptive { rtol, atol, dt_init } => {
            let mut h = dt_init.min(t_end);
            let mut k1 = l.apply(&y);
            for &stop in stops {
                while t < stop {
                    let last = t + h >= stop - 1e-15 * t_end;
                    let step = if last { stop - t } else { h };
                    if step <= 1e-14 * t_end.max(1.0) {
                        return Err(Error::StepSizeUnderflow { t });
                    }
                    let (y_new, k_new, err) = dopri_step(l, &y, &k1, step, rtol, atol);
                    if !err.is_finite() {
                        rec.rejected_steps += 1;
                        h = step * MIN_FACTOR;
                        if h <= 1e-14 * t_end.max(1.0) {
                            return Err(Error::NonFinite("propagated state"));
                        }
                        continue;
                    }
                    if err <= 1.0 {
                        t = if last { stop } else { t + step };
                        y = y_new;
                        k1 = k_new;
                        check_finite(&y)?;
                        rec.accepted_steps += 1;
                        since_monitor += 1;
                        let strided = stride_monitors && since_monitor == icfg.monitor_stride;
                        if strided || last {
                            monitors.record(&mut rec, t, &y)?;
                            since_monitor = 0;
                        }
                        let factor = if err == 0.0 {
                            MAX_FACTOR
                        } else {
                            (SAFETY * err.powf(-0.2)).clamp(MIN_FACTOR, MAX_FACTOR)
                        };
                        // a step shortened to hit a stop does not shrink the estimate
                        h = if last { h.max(step * factor) } else { step * factor };
                    } else {
                        rec.rejected_steps += 1;
                        h = step * (SAFETY * err.powf(-0.2)).clamp(MIN_FACTOR, 1.0);
                    }
                }
            }
        }
    }
    rec.final_state = y;
    Ok(rec)
}

/// First sampled time with `min_eig < threshold`.
pub fn positivity_breach_time(rec: &TrajectoryRecord, threshold: f64) -> Option<f64> {
    rec.times
        .iter()
        .zip(&rec.min_eig)
        .find(|(_, &m)| m < threshold)
        .map(|(&t, _)| t)
}

/// Relative singular-value threshold for the null space of a superoperator.
pub const NULL_SPACE_TOL: f64 = 1e-10;

/// Stationary state from the null space of a superoperator matrix.
pub fn stationary_state(s: &CMatrix) -> Result<DensityMatrix> {
    let size = s.nrows();
    let dim = (size as f64).sqrt().round() as usize;
    if dim * dim != size || !s.is_square() {
        return Err(Error::DimensionMismatch {
            expected: dim * dim,
            got: size,
        });
    }
    if s.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
        return Err(Error::NonFinite("superoperator"));
    }
    let svd = s.clone().svd(false, true);
    let sv = &svd.singular_values;
    let largest = sv.iter().copied().fold(0.0, f64::max);
    let null_dim = sv.iter().filter(|&&v| v <= NULL_SPACE_TOL * largest).count();
    if null_dim > 1 {
        return Err(Error::DegenerateNullSpace { dim: null_dim });
    }
    let (k, _) = sv
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("non-empty spectrum");
    let v_t = svd.v_t.as_ref().expect("requested right singular vectors");
    let vec: Vec<Complex64> = v_t.row(k).iter().map(|z| z.conj()).collect();
    let m = CMatrix::from_column_slice(dim, dim, &vec);
    // Fix the arbitrary phase so the trace is real and positive.
    let tr = m.trace();
    if tr.norm() == 0.0 {
        return Err(Error::InvalidState("null vector is traceless".into()));
    }
    let m = m * (tr.conj() / tr.norm());
    let rho = DensityMatrix::from_matrix_normalized(m)?;
    let residual = max_abs(&apply_superoperator(s, rho.matrix()));
    if residual > 1e-8 {
        return Err(Error::InvalidState(format!(
            "stationary residual {residual:e} exceeds 1e-8"
        )));
    }
    Ok(rho)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liouvillian::Generator;
    use crate::operators::{build_hamiltonian, HamiltonianKind};
    use crate::states::coherent_state;
    use approx::assert_abs_diff_eq;

    #[test]
    fn zero_generator_keeps_state() {
        let cfg = HilbertConfig::natural(8).unwrap();
        let rho = coherent_state(&cfg, 0.5, 0.2).unwrap();
        let rec = propagate(&rho, &Generator::zero(8), &cfg, &IntegratorConfig::rk45(3.0, 1e-8, 1)).unwrap();
        assert_eq!(&rec.final_state, rho.matrix());
        assert!(rec.trace_drift() < 1e-14);
        assert_eq!(positivity_breach_time(&rec, -1e-9), None);
    }

    #[test]
    fn times_increase_and_end_at_final() {
        let cfg = HilbertConfig::natural(10).unwrap();
        let h = build_hamiltonian(&cfg, HamiltonianKind::Harmonic { omega_trap: 1.0 }).unwrap();
        let l = Generator::hamiltonian(h.matrix(), 1.0);
        let rho = coherent_state(&cfg, 1.0, 0.0).unwrap();
        for icfg in [IntegratorConfig::rk45(2.5, 1e-9, 3), IntegratorConfig::rk4(2.5, 0.01, 7)] {
            let rec = propagate(&rho, &l, &cfg, &icfg).unwrap();
            assert!(rec.times.windows(2).all(|w| w[0] < w[1]));
            assert_eq!(*rec.times.last().unwrap(), 2.5);
            assert_eq!(rec.times.len(), rec.var_p.len());
            assert_eq!(rec.times.len(), rec.min_eig.len());
        }
    }

    #[test]
    fn rk4_divides_interval() {
        let cfg = HilbertConfig::natural(6).unwrap();
        let rho = coherent_state(&cfg, 0.0, 0.0).unwrap();
        let rec = propagate(&rho, &Generator::zero(6), &cfg, &IntegratorConfig::rk4(1.0, 0.3, 1)).unwrap();
        assert_eq!(rec.accepted_steps, 4);
        assert_abs_diff_eq!(rec.times[1], 0.25, epsilon = 1e-15);
    }

    #[test]
    fn invalid_configs() {
        let cfg = HilbertConfig::natural(6).unwrap();
        let rho = coherent_state(&cfg, 0.0, 0.0).unwrap();
        let bad = IntegratorConfig::rk4(-1.0, 0.1, 1);
        assert!(propagate(&rho, &Generator::zero(6), &cfg, &bad).is_err());
        let stride = IntegratorConfig::rk4(1.0, 0.1, 0);
        assert!(propagate(&rho, &Generator::zero(6), &cfg, &stride).is_err());
        let mismatch = IntegratorConfig::rk4(1.0, 0.1, 1);
        assert!(matches!(
            propagate(&rho, &Generator::zero(7), &cfg, &mismatch),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn breach_time_picks_first_sample() {
        let rec = TrajectoryRecord {
            times: vec![0.0, 1.0, 2.0, 3.0],
            trace: vec![1.0; 4],
            min_eig: vec![0.0, -1e-8, -2e-6, -1e-3],
            purity: vec![1.0; 4],
            mean_x: vec![0.0; 4],
            mean_p: vec![0.0; 4],
            var_x: vec![0.0; 4],
            var_p: vec![0.0; 4],
            hermiticity: vec![0.0; 4],
            final_state: CMatrix::zeros(1, 1),
            accepted_steps: 3,
            rejected_steps: 0,
        };
        assert_eq!(positivity_breach_time(&rec, -1e-6), Some(2.0));
        assert_eq!(positivity_breach_time(&rec, -1e-9), Some(1.0));
        assert_eq!(positivity_breach_time(&rec, -1.0), None);
    }
}
