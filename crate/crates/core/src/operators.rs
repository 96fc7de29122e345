// SPDX-License-Identifier: Apache-2.0

//! Operator algebra in a truncated harmonic-oscillator number basis.
//!
//! The basis oscillator frequency `omega_basis` only fixes the length scale of
//! the representation; it carries no physics. Operators are assembled as finite
//! matrices and every derived operator is a product of those truncated
//! matrices, never an analytic matrix element of the product.

use nalgebra::SymmetricEigen;

use crate::{CMatrix, Complex64, Error, Result};

const HERMITIAN_TOL: f64 = 1e-12;
const TRACE_TOL: f64 = 1e-12;
const POSITIVITY_TOL: f64 = 1e-10;

/// Truncation size and physical constants of the single-particle Hilbert space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HilbertConfig {
    pub dim: usize,
    pub hbar: f64,
    pub mass: f64,
    pub omega_basis: f64,
}

impl HilbertConfig {
    pub fn new(dim: usize, hbar: f64, mass: f64, omega_basis: f64) -> Result<Self> {
        let cfg = Self {
            dim,
            hbar,
            mass,
            omega_basis,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Dimension-`dim` space with `hbar = mass = omega_basis = 1`.
    pub fn natural(dim: usize) -> Result<Self> {
        Self::new(dim, 1.0, 1.0, 1.0)
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim < 4 {
            return Err(Error::param("dim", format!("{} < 4", self.dim)));
        }
        for (name, v) in [
            ("hbar", self.hbar),
            ("mass", self.mass),
            ("omega_basis", self.omega_basis),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::param(name, format!("{v} is not a positive number")));
            }
        }
        Ok(())
    }

    /// `sqrt(hbar / (2 M omega))`, the coefficient of `b + b†` in `x`.
    pub fn position_scale(&self) -> f64 {
        (self.hbar / (2.0 * self.mass * self.omega_basis)).sqrt()
    }

    /// `sqrt(hbar M omega / 2)`, the coefficient of `i(b† - b)` in `p`.
    pub fn momentum_scale(&self) -> f64 {
        (self.hbar * self.mass * self.omega_basis / 2.0).sqrt()
    }
}

/// Thermal de Broglie wavelength `sqrt(hbar^2 beta / M)`.
pub fn thermal_wavelength(hbar: f64, beta: f64, mass: f64) -> f64 {
    (hbar * hbar * beta / mass).sqrt()
}

/// Square complex matrix with finite entries.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix(CMatrix);

impl OperatorMatrix {
    pub fn new(m: CMatrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::DimensionMismatch {
                expected: m.nrows(),
                got: m.ncols(),
            });
        }
        if m.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::NonFinite("operator matrix"));
        }
        Ok(Self(m))
    }

    pub fn identity(dim: usize) -> Self {
        Self(CMatrix::identity(dim, dim))
    }

    pub fn zeros(dim: usize) -> Self {
        Self(CMatrix::zeros(dim, dim))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> CMatrix {
        self.0
    }

    pub fn dagger(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn commutator(&self, other: &Self) -> Self {
        Self(commutator(&self.0, &other.0))
    }

    pub fn anticommutator(&self, other: &Self) -> Self {
        Self(anticommutator(&self.0, &other.0))
    }

    pub fn trace(&self) -> Complex64 {
        self.0.trace()
    }

    /// Largest entrywise `|A - A†|`.
    pub fn hermitian_defect(&self) -> f64 {
        hermitian_defect(&self.0)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_defect() <= tol
    }
}

impl AsRef<CMatrix> for OperatorMatrix {
    fn as_ref(&self) -> &CMatrix {
        &self.0
    }
}

/// Hermitian, unit-trace, positive semidefinite operator.
///
/// The checks apply only at construction; evolved states are kept as plain
/// matrices so that a loss of positivity can be observed.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    op: OperatorMatrix,
}

impl DensityMatrix {
    pub fn new(op: OperatorMatrix) -> Result<Self> {
        let defect = op.hermitian_defect();
        if defect > HERMITIAN_TOL {
            return Err(Error::InvalidState(format!(
                "hermiticity defect {defect:e}"
            )));
        }
        let tr = op.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::InvalidState(format!("trace {tr}")));
        }
        let lmin = min_eigenvalue(op.matrix())?;
        if lmin < -POSITIVITY_TOL {
            return Err(Error::InvalidState(format!("minimum eigenvalue {lmin:e}")));
        }
        Ok(Self { op })
    }

    /// Hermitizes and normalizes `m` before validation.
    pub fn from_matrix_normalized(m: CMatrix) -> Result<Self> {
        let mut h = hermitize(&m);
        let tr = h.trace().re;
        if !(tr.is_finite() && tr.abs() > 0.0) {
            return Err(Error::InvalidState(format!("trace {tr}")));
        }
        h.unscale_mut(tr);
        Self::new(OperatorMatrix::new(h)?)
    }

    /// `|psi><psi| / <psi|psi>`.
    pub fn pure(psi: &nalgebra::DVector<Complex64>) -> Result<Self> {
        let norm2 = psi.norm_squared();
        if !(norm2 > 0.0 && norm2.is_finite()) {
            return Err(Error::InvalidState("zero or non-finite state vector".into()));
        }
        let m = psi * psi.adjoint() / Complex64::from(norm2);
        Self::from_matrix_normalized(m)
    }

    /// Number state `|n><n|`.
    pub fn number_state(dim: usize, n: usize) -> Result<Self> {
        if n >= dim {
            return Err(Error::param("n", format!("{n} outside dimension {dim}")));
        }
        let mut m = CMatrix::zeros(dim, dim);
        m[(n, n)] = Complex64::from(1.0);
        Self::new(OperatorMatrix(m))
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            op: OperatorMatrix(CMatrix::identity(dim, dim) / Complex64::from(dim as f64)),
        }
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    pub fn op(&self) -> &OperatorMatrix {
        &self.op
    }

    pub fn matrix(&self) -> &CMatrix {
        self.op.matrix()
    }

    pub fn into_matrix(self) -> CMatrix {
        self.op.into_matrix()
    }
}

impl AsRef<CMatrix> for DensityMatrix {
    fn as_ref(&self) -> &CMatrix {
        self.matrix()
    }
}

pub fn commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b - b * a
}

pub fn anticommutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b + b * a
}

/// `(m + m†) / 2`.
pub fn hermitize(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()) * Complex64::from(0.5)
}

pub fn hermitian_defect(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0_f64;
    for j in 0..n {
        for i in 0..=j {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Largest entrywise modulus.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0_f64, |acc, z| acc.max(z.norm()))
}

/// Truncated basis annihilation operator `b`, with `b|n> = sqrt(n)|n-1>`.
pub fn ladder_annihilation(dim: usize) -> CMatrix {
    let mut b = CMatrix::zeros(dim, dim);
    for n in 1..dim {
        b[(n - 1, n)] = Complex64::from((n as f64).sqrt());
    }
    b
}

/// `x = sqrt(hbar / 2 M omega) (b + b†)`: real symmetric and tridiagonal.
pub fn build_position(cfg: &HilbertConfig) -> OperatorMatrix {
    let s = cfg.position_scale();
    let mut x = CMatrix::zeros(cfg.dim, cfg.dim);
    for n in 1..cfg.dim {
        let v = Complex64::from(s * (n as f64).sqrt());
        x[(n - 1, n)] = v;
        x[(n, n - 1)] = v;
    }
    OperatorMatrix(x)
}

/// `p = i sqrt(hbar M omega / 2) (b† - b)`: imaginary antisymmetric and tridiagonal.
pub fn build_momentum(cfg: &HilbertConfig) -> OperatorMatrix {
    let s = cfg.momentum_scale();
    let mut p = CMatrix::zeros(cfg.dim, cfg.dim);
    for n in 1..cfg.dim {
        let v = s * (n as f64).sqrt();
        p[(n, n - 1)] = Complex64::new(0.0, v);
        p[(n - 1, n)] = Complex64::new(0.0, -v);
    }
    OperatorMatrix(p)
}

/// Particle Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum HamiltonianKind {
    Free,
    Harmonic { omega_trap: f64 },
}

impl HamiltonianKind {
    pub fn validate(&self) -> Result<()> {
        match *self {
            HamiltonianKind::Free => Ok(()),
            HamiltonianKind::Harmonic { omega_trap } if omega_trap.is_finite() && omega_trap > 0.0 => {
                Ok(())
            }
            HamiltonianKind::Harmonic { omega_trap } => Err(Error::param(
                "omega_trap",
                format!("{omega_trap} is not a positive number"),
            )),
        }
    }
}

/// `p²/2M` (plus `M ω² x² / 2` when harmonic), from products of the truncated `x` and `p`.
pub fn build_hamiltonian(cfg: &HilbertConfig, kind: HamiltonianKind) -> Result<OperatorMatrix> {
    kind.validate()?;
    let p = build_momentum(cfg).into_matrix();
    let mut h = &p * &p * Complex64::from(0.5 / cfg.mass);
    if let HamiltonianKind::Harmonic { omega_trap } = kind {
        let x = build_position(cfg).into_matrix();
        h += &x * &x * Complex64::from(0.5 * cfg.mass * omega_trap * omega_trap);
    }
    Ok(OperatorMatrix(hermitize(&h)))
}

/// `â = (√2/λ)(x + (i/ħ)(λ²/4) p)` with `λ = sqrt(ħ²β/M)` the thermal wavelength.
///
/// This coincides with the basis ladder operator only when
/// `λ = 2 sqrt(ħ / (M ω_basis))`.
pub fn build_annihilator(cfg: &HilbertConfig, beta: f64) -> Result<OperatorMatrix> {
    if !(beta.is_finite() && beta > 0.0) {
        return Err(Error::param("beta", format!("{beta} is not a positive number")));
    }
    let lambda = thermal_wavelength(cfg.hbar, beta, cfg.mass);
    let x = build_position(cfg).into_matrix();
    let p = build_momentum(cfg).into_matrix();
    let c = Complex64::new(0.0, lambda * lambda / (4.0 * cfg.hbar));
    let a = (x + p * c) * Complex64::from(std::f64::consts::SQRT_2 / lambda);
    Ok(OperatorMatrix(a))
}

/// `b† b` in the truncated basis.
pub fn number_operator(dim: usize) -> OperatorMatrix {
    let mut n = CMatrix::zeros(dim, dim);
    for k in 0..dim {
        n[(k, k)] = Complex64::from(k as f64);
    }
    OperatorMatrix(n)
}

/// `Tr(ρ A)`.
pub fn expectation(rho: &CMatrix, a: &CMatrix) -> Result<Complex64> {
    if rho.nrows() != a.nrows() || !a.is_square() {
        return Err(Error::DimensionMismatch {
            expected: rho.nrows(),
            got: a.nrows(),
        });
    }
    // Tr(ρA) = Σ_ij ρ_ij A_ji without forming the product.
    let n = rho.nrows();
    let mut acc = Complex64::from(0.0);
    for j in 0..n {
        for i in 0..n {
            acc += rho[(i, j)] * a[(j, i)];
        }
    }
    Ok(acc)
}

/// Eigen-decomposition of the Hermitian part of `m`, eigenvalues ascending.
pub fn hermitian_eigen(m: &CMatrix) -> Result<(Vec<f64>, CMatrix)> {
    if m.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
        return Err(Error::NonFinite("eigensolver input"));
    }
    let eig = SymmetricEigen::new(hermitize(m));
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = CMatrix::from_fn(m.nrows(), m.ncols(), |i, j| eig.eigenvectors[(i, order[j])]);
    Ok((values, vectors))
}

/// Applies a scalar function to a Hermitian matrix through its spectral decomposition.
pub fn hermitian_function(m: &CMatrix, f: impl Fn(f64) -> Complex64) -> Result<CMatrix> {
    let (values, v) = hermitian_eigen(m)?;
    Ok(spectral_apply(&values, &v, f))
}

pub(crate) fn spectral_apply(values: &[f64], v: &CMatrix, f: impl Fn(f64) -> Complex64) -> CMatrix {
    let mut scaled = v.clone();
    for (j, &lam) in values.iter().enumerate() {
        let fj = f(lam);
        for z in scaled.column_mut(j).iter_mut() {
            *z *= fj;
        }
    }
    scaled * v.adjoint()
}

/// Smallest eigenvalue of `(ρ + ρ†)/2`.
pub fn min_eigenvalue(rho: &CMatrix) -> Result<f64> {
    let (values, _) = hermitian_eigen(rho)?;
    values
        .first()
        .copied()
        .ok_or(Error::InvalidState("empty matrix".into()))
}

/// All eigenvalues of `(ρ + ρ†)/2`, ascending.
pub fn eigenvalues(rho: &CMatrix) -> Result<Vec<f64>> {
    hermitian_eigen(rho).map(|(v, _)| v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn natural(dim: usize) -> HilbertConfig {
        // dim below 4 is rejected by validate(); the 2x2 checks bypass it.
        HilbertConfig {
            dim,
            hbar: 1.0,
            mass: 1.0,
            omega_basis: 1.0,
        }
    }

    #[test]
    fn rejects_small_dim_and_bad_constants() {
        assert!(HilbertConfig::new(3, 1.0, 1.0, 1.0).is_err());
        assert!(HilbertConfig::new(8, 0.0, 1.0, 1.0).is_err());
        assert!(HilbertConfig::new(8, 1.0, -1.0, 1.0).is_err());
        assert!(HilbertConfig::new(8, 1.0, 1.0, f64::NAN).is_err());
        assert!(HilbertConfig::new(4, 1.0, 1.0, 1.0).is_ok());
    }

    #[test]
    fn two_level_position_and_momentum() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let x = build_position(&natural(2));
        let p = build_momentum(&natural(2));
        let want_x = CMatrix::from_row_slice(2, 2, &[c(0., 0.), c(s, 0.), c(s, 0.), c(0., 0.)]);
        let want_p = CMatrix::from_row_slice(2, 2, &[c(0., 0.), c(0., -s), c(0., s), c(0., 0.)]);
        assert_eq!(x.matrix(), &want_x);
        assert_eq!(p.matrix(), &want_p);
        assert_eq!(x.hermitian_defect(), 0.0);
        assert_eq!(p.hermitian_defect(), 0.0);
    }

    #[test]
    fn canonical_commutator_on_leading_block() {
        let cfg = HilbertConfig::new(40, 1.3, 0.7, 2.1).unwrap();
        let x = build_position(&cfg);
        let p = build_momentum(&cfg);
        let comm = x.commutator(&p).into_matrix();
        let n = cfg.dim;
        for i in 0..n - 1 {
            for j in 0..n - 1 {
                let want = if i == j { c(0.0, cfg.hbar) } else { c(0.0, 0.0) };
                assert!((comm[(i, j)] - want).norm() < 1e-10, "({i},{j})");
            }
        }
        let corner = comm[(n - 1, n - 1)];
        assert_abs_diff_eq!(corner.re, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(corner.im, -cfg.hbar * (n as f64 - 1.0), epsilon = 1e-10);
        assert_eq!(p.trace(), c(0.0, 0.0));
    }

    #[test]
    fn harmonic_spectrum_matches_ladder() {
        let cfg = natural(20);
        let h = build_hamiltonian(&cfg, HamiltonianKind::Harmonic { omega_trap: 1.0 }).unwrap();
        assert_eq!(h.hermitian_defect(), 0.0);
        let dim = cfg.dim;
        let lead = h.matrix().view((0, 0), (dim - 1, dim - 1)).into_owned();
        let values = eigenvalues(&lead).unwrap();
        for (n, v) in values.iter().enumerate() {
            assert_abs_diff_eq!(*v, n as f64 + 0.5, epsilon = 1e-8);
        }
    }

    #[test]
    fn free_hamiltonian_two_level() {
        let cfg = natural(2);
        let h = build_hamiltonian(&cfg, HamiltonianKind::Free).unwrap();
        let want = CMatrix::identity(2, 2) * c(0.25, 0.0);
        assert!(max_abs(&(h.matrix() - want)) < 1e-15);
        assert!(build_hamiltonian(&cfg, HamiltonianKind::Harmonic { omega_trap: 0.0 }).is_err());
    }

    #[test]
    fn annihilator_reduces_to_ladder_at_matched_wavelength() {
        let cfg = HilbertConfig::new(12, 1.0, 2.0, 0.5).unwrap();
        // λ = 2 sqrt(ħ/(Mω)) ⇔ β = 4 / (ħ ω)
        let beta = 4.0 / (cfg.hbar * cfg.omega_basis);
        let lambda = thermal_wavelength(cfg.hbar, beta, cfg.mass);
        assert_abs_diff_eq!(
            lambda,
            2.0 * (cfg.hbar / (cfg.mass * cfg.omega_basis)).sqrt(),
            epsilon = 1e-14
        );
        let a = build_annihilator(&cfg, beta).unwrap();
        let b = ladder_annihilation(cfg.dim);
        assert!(max_abs(&(a.matrix() - b)) < 1e-13);
    }

    #[test]
    fn annihilator_commutator_is_identity_on_leading_block() {
        for beta in [0.1, 1.0, 7.5] {
            let cfg = HilbertConfig::new(30, 1.0, 1.7, 0.8).unwrap();
            let a = build_annihilator(&cfg, beta).unwrap();
            let comm = a.commutator(&a.dagger()).into_matrix();
            let n = cfg.dim - 1;
            let lead = comm.view((0, 0), (n, n)).into_owned();
            assert!(max_abs(&(lead - CMatrix::identity(n, n))) < 1e-10);
        }
        let small = natural(2);
        let a = build_annihilator(&small, 1.0).unwrap();
        assert_eq!(a.commutator(&a.dagger()).trace().norm(), 0.0);
        assert!(build_annihilator(&small, 0.0).is_err());
    }

    #[test]
    fn expectation_values() {
        let dim = 6;
        let cfg = natural(dim);
        let vac = DensityMatrix::number_state(dim, 0).unwrap();
        let n = number_operator(dim);
        assert_eq!(expectation(vac.matrix(), n.matrix()).unwrap(), c(0.0, 0.0));

        let mixed = DensityMatrix::maximally_mixed(dim);
        let one = expectation(mixed.matrix(), &CMatrix::identity(dim, dim)).unwrap();
        assert_abs_diff_eq!(one.re, 1.0, epsilon = 1e-15);

        let x = build_position(&cfg).into_matrix();
        let first = DensityMatrix::number_state(dim, 1).unwrap();
        let x2 = expectation(first.matrix(), &(&x * &x)).unwrap();
        assert_abs_diff_eq!(x2.re, 1.5, epsilon = 1e-14);
        assert_eq!(x2.im, 0.0);

        assert!(expectation(first.matrix(), &CMatrix::identity(3, 3)).is_err());
    }

    #[test]
    fn minimum_eigenvalues() {
        let vac = DensityMatrix::number_state(5, 0).unwrap();
        assert_abs_diff_eq!(min_eigenvalue(vac.matrix()).unwrap(), 0.0, epsilon = 1e-12);
        let mixed = DensityMatrix::maximally_mixed(5);
        assert_abs_diff_eq!(min_eigenvalue(mixed.matrix()).unwrap(), 0.2, epsilon = 1e-12);

        // 0.5 ± 0.6 for the coupled pair
        let m = CMatrix::from_row_slice(2, 2, &[c(0.5, 0.), c(0.6, 0.), c(0.6, 0.), c(0.5, 0.)]);
        assert_abs_diff_eq!(min_eigenvalue(&m).unwrap(), -0.1, epsilon = 1e-12);
        assert!(DensityMatrix::new(OperatorMatrix::new(m).unwrap()).is_err());

        let mut bad = CMatrix::identity(2, 2);
        bad[(0, 1)] = c(f64::NAN, 0.0);
        assert!(min_eigenvalue(&bad).is_err());
    }

    #[test]
    fn density_matrix_validation() {
        let mut m = CMatrix::identity(4, 4) * c(0.25, 0.0);
        assert!(DensityMatrix::new(OperatorMatrix::new(m.clone()).unwrap()).is_ok());
        m[(0, 1)] = c(0.1, 0.0);
        assert!(DensityMatrix::new(OperatorMatrix::new(m.clone()).unwrap()).is_err());
        m[(1, 0)] = c(0.1, 0.0);
        m[(0, 0)] = c(0.5, 0.0);
        assert!(DensityMatrix::new(OperatorMatrix::new(m).unwrap()).is_err());
        assert!(OperatorMatrix::new(CMatrix::zeros(2, 3)).is_err());
    }

    #[test]
    fn hermitian_function_exponentiates() {
        let cfg = natural(8);
        let x = build_position(&cfg).into_matrix();
        let u = hermitian_function(&x, |l| Complex64::new(0.0, 0.3 * l).exp()).unwrap();
        let uu = &u * u.adjoint();
        assert!(max_abs(&(uu - CMatrix::identity(8, 8))) < 1e-13);
    }
}
