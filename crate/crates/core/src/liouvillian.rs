// SPDX-License-Identifier: Apache-2.0

//! Master-equation generators `dρ/dt = L[ρ]`.
//!
//! Every generator is stored in a half form
//!
//! ```text
//! L[ρ] = M + M†,   M = K ρ + Σ_j A_j ρ B_j
//! ```
//!
//! which makes Hermiticity preservation exact in floating point and keeps the
//! number of matrix products per application small. A Hamiltonian enters as
//! `K = −(i/ħ)H`; a Lindblad operator `V` with rate `r` enters as
//! `K += −(r/2)V†V` and the sandwich `(V, (r/2)V†)`.

use std::f64::consts::PI;

use crate::coeffs::{CoefficientSet, TMatrixModel};
use crate::operators::{
    build_annihilator, build_hamiltonian, build_momentum, build_position, hermitian_eigen,
    max_abs, spectral_apply, thermal_wavelength, HamiltonianKind, HilbertConfig,
};
use crate::quadrature::gauss_legendre;
use crate::{CMatrix, Complex64, Error, Result};

/// Largest superoperator size (`dim²`) that may be materialized.
pub const SUPEROPERATOR_LIMIT: usize = 10_000;

/// Bound on `(β/4M) q_max ‖p‖`, the exponent of the collision factor `G(q)`.
pub const COLLISION_EXPONENT_LIMIT: f64 = 5.0;

/// A linear map on density matrices.
pub trait Liouvillian {
    fn dim(&self) -> usize;
    fn apply(&self, rho: &CMatrix) -> CMatrix;
}

#[derive(Debug, Clone, PartialEq)]
struct Sandwich {
    left: CMatrix,
    right: CMatrix,
}

/// An assembled generator in half form.
#[derive(Debug, Clone, PartialEq)]
pub struct Generator {
    label: &'static str,
    left: CMatrix,
    sandwiches: Vec<Sandwich>,
}

impl Generator {
    fn half(&self, rho: &CMatrix) -> CMatrix {
        let one = Complex64::from(1.0);
        let mut half = &self.left * rho;
        for s in &self.sandwiches {
            let tmp = &s.left * rho;
            half.gemm(one, &tmp, &s.right, one);
        }
        half
    }

    pub fn zero(dim: usize) -> Self {
        Self {
            label: "zero",
            left: CMatrix::zeros(dim, dim),
            sandwiches: Vec::new(),
        }
    }

    /// `−(i/ħ)[H, ·]`.
    pub fn hamiltonian(h: &CMatrix, hbar: f64) -> Self {
        Self {
            label: "hamiltonian",
            left: h * Complex64::new(0.0, -1.0 / hbar),
            sandwiches: Vec::new(),
        }
    }

    pub fn label(&self) -> &'static str {
        self.label
    }

    fn add_sandwich(&mut self, left: CMatrix, right: CMatrix) {
        self.sandwiches.push(Sandwich { left, right });
    }
}

impl Liouvillian for Generator {
    fn dim(&self) -> usize {
        self.left.nrows()
    }

    /// `M[ρ] + M[ρ†]†`, which reduces to `M + M†` on Hermitian input and is
    /// the complex-linear extension otherwise.
    fn apply(&self, rho: &CMatrix) -> CMatrix {
        let half = self.half(rho);
        let rho_adj = rho.adjoint();
        if rho_adj == *rho {
            let adj = half.adjoint();
            half + adj
        } else {
            half + self.half(&rho_adj).adjoint()
        }
    }
}

/// Coefficients of the general bilinear generator.
///
/// `fugacity` scales the dissipator (`γ`, `D_pp`, `D_xx`, `D_xp`) but not
/// the Hamiltonian or the `μ` shift.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BilinearCoefficients {
    pub gamma: f64,
    pub mu: f64,
    pub d_pp: f64,
    pub d_xx: f64,
    pub d_xp: f64,
    pub fugacity: f64,
}

impl Default for BilinearCoefficients {
    fn default() -> Self {
        Self {
            gamma: 0.0,
            mu: 0.0,
            d_pp: 0.0,
            d_xx: 0.0,
            d_xp: 0.0,
            fugacity: 1.0,
        }
    }
}

impl BilinearCoefficients {
    pub fn from_set(c: &CoefficientSet, fugacity: f64) -> Self {
        Self {
            gamma: c.gamma,
            mu: c.mu,
            d_pp: c.d_pp,
            d_xx: c.d_xx,
            d_xp: c.d_xp,
            fugacity,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("gamma", self.gamma),
            ("mu", self.mu),
            ("d_pp", self.d_pp),
            ("d_xx", self.d_xx),
            ("d_xp", self.d_xp),
            ("fugacity", self.fugacity),
        ] {
            if !v.is_finite() {
                return Err(Error::param(name, format!("{v} is not finite")));
            }
        }
        for (name, v) in [
            ("d_pp", self.d_pp),
            ("d_xx", self.d_xx),
            ("fugacity", self.fugacity),
        ] {
            if v < 0.0 {
                return Err(Error::param(name, format!("{v} is negative")));
            }
        }
        Ok(())
    }
}

/// Parameters of the Boltzmann-gas collision generator, including the
/// momentum-transfer quadrature over `(0, q_max]` (mirrored to negative `q`).
#[derive(Debug, Clone, PartialEq)]
pub struct CollisionParameters {
    pub gas_mass: f64,
    pub beta: f64,
    pub fugacity: f64,
    pub tmatrix: TMatrixModel,
    pub q_nodes: Vec<f64>,
    pub q_weights: Vec<f64>,
    pub q_max: f64,
}

impl CollisionParameters {
    /// Gauss–Legendre rule with `n` nodes on `(0, q_max)`.
    pub fn gauss_legendre(
        gas_mass: f64,
        beta: f64,
        fugacity: f64,
        tmatrix: TMatrixModel,
        q_max: f64,
        n: usize,
    ) -> Result<Self> {
        if n == 0 {
            return Err(Error::param("q_nodes", "empty momentum-transfer grid"));
        }
        let (x, w) = gauss_legendre(n);
        let params = Self {
            gas_mass,
            beta,
            fugacity,
            tmatrix,
            q_nodes: x.iter().map(|x| 0.5 * q_max * (x + 1.0)).collect(),
            q_weights: w.iter().map(|w| 0.5 * q_max * w).collect(),
            q_max,
        };
        params.validate()?;
        Ok(params)
    }

    /// Same rule with every node and weight scaled by `s`.
    pub fn scaled(&self, s: f64) -> Result<Self> {
        let p = Self {
            q_nodes: self.q_nodes.iter().map(|q| q * s).collect(),
            q_weights: self.q_weights.iter().map(|w| w * s).collect(),
            q_max: self.q_max * s,
            ..self.clone()
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        self.tmatrix.validate()?;
        for (name, v) in [
            ("gas_mass", self.gas_mass),
            ("beta", self.beta),
            ("fugacity", self.fugacity),
            ("q_max", self.q_max),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::param(name, format!("{v} is not a positive number")));
            }
        }
        if self.q_nodes.is_empty() {
            return Err(Error::param("q_nodes", "empty momentum-transfer grid"));
        }
        if self.q_nodes.len() != self.q_weights.len() {
            return Err(Error::param("q_weights", "length differs from q_nodes"));
        }
        if self.q_nodes.iter().any(|&q| !(q > 0.0 && q <= self.q_max)) {
            return Err(Error::param("q_nodes", "nodes must lie in (0, q_max]"));
        }
        if self.q_weights.iter().any(|&w| !(w > 0.0 && w.is_finite())) {
            return Err(Error::param("q_weights", "weights must be positive"));
        }
        Ok(())
    }

    /// `8π³m² / (3βħ)`: the 3D prefactor `4π²m²/βħ` folded with the projection
    /// of the isotropic `d³q` measure onto one Cartesian axis.
    pub fn prefactor(&self, hbar: f64) -> f64 {
        8.0 * PI.powi(3) * self.gas_mass * self.gas_mass / (3.0 * self.beta * hbar)
    }

    /// Rate attached to the node pair `±q`, without the fugacity.
    fn node_rate(&self, q: f64, w: f64, hbar: f64) -> f64 {
        self.prefactor(hbar) * w * q * self.tmatrix.squared(q)
            * (-self.beta * q * q / (8.0 * self.gas_mass)).exp()
    }

    /// One-dimensional momentum diffusion encoded by this grid: half the
    /// second moment `Σ_{±q} rate(q) q²`. On a grid covering the Boltzmann
    /// factor it equals the microphysical `D_pp`.
    pub fn matched_dpp(&self, hbar: f64) -> f64 {
        self.q_nodes
            .iter()
            .zip(&self.q_weights)
            .map(|(&q, &w)| self.node_rate(q, w, hbar) * q * q)
            .sum()
    }
}

/// What to build.
#[derive(Debug, Clone, PartialEq)]
pub enum GeneratorKind {
    CaldeiraLeggett { gamma: f64, beta: f64 },
    Bilinear(BilinearCoefficients),
    /// Minimal completely positive generator; `D_xx` and `γ` follow from `D_pp`.
    MinimalQbm { d_pp: f64, beta: f64, fugacity: f64 },
    BoltzmannCollision(CollisionParameters),
}

impl GeneratorKind {
    pub fn name(&self) -> &'static str {
        match self {
            GeneratorKind::CaldeiraLeggett { .. } => "caldeira_leggett",
            GeneratorKind::Bilinear(_) => "bilinear",
            GeneratorKind::MinimalQbm { .. } => "minimal_qbm",
            GeneratorKind::BoltzmannCollision(_) => "boltzmann_collision",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LiouvillianSpec {
    pub hamiltonian: HamiltonianKind,
    pub kind: GeneratorKind,
}

/// Builds the generator named by `spec.kind`.
pub fn build(cfg: &HilbertConfig, spec: &LiouvillianSpec) -> Result<Generator> {
    match spec.kind {
        GeneratorKind::CaldeiraLeggett { .. } => build_caldeira_leggett(cfg, spec),
        GeneratorKind::Bilinear(_) => build_bilinear_lindblad(cfg, spec),
        GeneratorKind::MinimalQbm { .. } => build_minimal_qbm(cfg, spec),
        GeneratorKind::BoltzmannCollision(_) => build_boltzmann_collision(cfg, spec),
    }
}

fn wrong_kind(expected: &'static str, spec: &LiouvillianSpec) -> Error {
    Error::WrongKind {
        expected,
        got: spec.kind.name(),
    }
}

fn positive(name: &'static str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::param(name, format!("{v} is not a positive number")))
    }
}

/// Shared assembly of
/// `−(i/ħ)[H,ρ] − (i/ħ)μ[ρ,{x,p}] − z{ (i/ħ)γ[x,{p,ρ}] + (D_xx/ħ²)[p,[p,ρ]]
///  + (D_pp/ħ²)[x,[x,ρ]] − (D_xp/ħ²)([p,[x,ρ]] + [x,[p,ρ]]) }`.
fn assemble_bilinear(
    label: &'static str,
    cfg: &HilbertConfig,
    hamiltonian: HamiltonianKind,
    c: &BilinearCoefficients,
) -> Result<Generator> {
    c.validate()?;
    let hbar = cfg.hbar;
    let h = build_hamiltonian(cfg, hamiltonian)?.into_matrix();
    let x = build_position(cfg).into_matrix();
    let p = build_momentum(cfg).into_matrix();
    let z = c.fugacity;
    let (gamma, d_pp, d_xx, d_xp) = (z * c.gamma, z * c.d_pp, z * c.d_xx, z * c.d_xp);
    let i = Complex64::i();
    let re = Complex64::from;

    let mut g = Generator::hamiltonian(&h, hbar);
    g.label = label;
    let xp = &x * &p;
    if c.mu != 0.0 || d_xp != 0.0 {
        let anti = &xp + xp.adjoint();
        g.left += anti * (i * (c.mu / hbar) + re(d_xp / (hbar * hbar)));
    }
    if gamma != 0.0 {
        g.left -= &xp * (i * (gamma / hbar));
    }
    if d_xx != 0.0 {
        g.left -= &p * &p * re(d_xx / (hbar * hbar));
    }
    if d_pp != 0.0 {
        g.left -= &x * &x * re(d_pp / (hbar * hbar));
    }

    // Full sandwich coefficients: c_xx = 2D_pp/ħ², c_pp = 2D_xx/ħ²,
    // c_xp = −iγ/ħ − 2D_xp/ħ², c_px = conj(c_xp). The half form keeps
    // c_xx/2, c_pp/2 and c_xp.
    let c_xp = -i * (gamma / hbar) - re(2.0 * d_xp / (hbar * hbar));
    if d_pp != 0.0 || c_xp != re(0.0) {
        let right = &x * re(d_pp / (hbar * hbar)) + &p * c_xp;
        g.add_sandwich(x.clone(), right);
    }
    if d_xx != 0.0 {
        let right = &p * re(d_xx / (hbar * hbar));
        g.add_sandwich(p, right);
    }
    Ok(g)
}

/// `−(i/ħ)[H,ρ] − (i/ħ)γ[x,{p,ρ}] − (2Mγ/βħ²)[x,[x,ρ]]`.
pub fn build_caldeira_leggett(cfg: &HilbertConfig, spec: &LiouvillianSpec) -> Result<Generator> {
    let GeneratorKind::CaldeiraLeggett { gamma, beta } = spec.kind else {
        return Err(wrong_kind("caldeira_leggett", spec));
    };
    if !(gamma.is_finite() && gamma >= 0.0) {
        return Err(Error::param("gamma", format!("{gamma} is not a non-negative number")));
    }
    positive("beta", beta)?;
    let coeffs = BilinearCoefficients {
        gamma,
        d_pp: caldeira_leggett_dpp(gamma, beta, cfg.mass),
        ..Default::default()
    };
    assemble_bilinear("caldeira_leggett", cfg, spec.hamiltonian, &coeffs)
}

/// Momentum diffusion of the Caldeira–Leggett equation, `2Mγ/β`.
pub fn caldeira_leggett_dpp(gamma: f64, beta: f64, mass: f64) -> f64 {
    2.0 * mass * gamma / beta
}

pub fn build_bilinear_lindblad(cfg: &HilbertConfig, spec: &LiouvillianSpec) -> Result<Generator> {
    let GeneratorKind::Bilinear(ref c) = spec.kind else {
        return Err(wrong_kind("bilinear", spec));
    };
    assemble_bilinear("bilinear", cfg, spec.hamiltonian, c)
}

fn minimal_parts(cfg: &HilbertConfig, spec: &LiouvillianSpec) -> Result<(CoefficientSet, f64, f64)> {
    let GeneratorKind::MinimalQbm {
        d_pp,
        beta,
        fugacity,
    } = spec.kind
    else {
        return Err(wrong_kind("minimal_qbm", spec));
    };
    if !(fugacity.is_finite() && fugacity >= 0.0) {
        return Err(Error::param("fugacity", format!("{fugacity} is not a non-negative number")));
    }
    let set = CoefficientSet::from_momentum_diffusion(d_pp, beta, cfg.mass, cfg.hbar)?;
    Ok((set, beta, fugacity))
}

/// Coefficients implied by a `minimal_qbm` spec (per unit fugacity).
pub fn minimal_qbm_coefficients(cfg: &HilbertConfig, spec: &LiouvillianSpec) -> Result<CoefficientSet> {
    minimal_parts(cfg, spec).map(|(set, _, _)| set)
}

/// Double-commutator form
/// `−(i/ħ)[H,ρ] − z{ (D_pp/ħ²)[x,[x,ρ]] + (D_xx/ħ²)[p,[p,ρ]] + (i/ħ)γ[x,{p,ρ}] }`.
pub fn build_minimal_qbm(cfg: &HilbertConfig, spec: &LiouvillianSpec) -> Result<Generator> {
    let (set, _, z) = minimal_parts(cfg, spec)?;
    let coeffs = BilinearCoefficients {
        mu: 0.0,
        ..BilinearCoefficients::from_set(&set, z)
    };
    assemble_bilinear("minimal_qbm", cfg, spec.hamiltonian, &coeffs)
}

/// Single-generator form of the same equation:
/// `−(i/ħ)[H + zμ{x,p}, ρ] + (z D_pp λ²/ħ²)(â ρ â† − ½{â†â, ρ})`
/// with `μ = D_pp λ²/4ħ²` and `â` from [`build_annihilator`].
pub fn build_minimal_qbm_single_generator(
    cfg: &HilbertConfig,
    spec: &LiouvillianSpec,
) -> Result<Generator> {
    let (set, beta, z) = minimal_parts(cfg, spec)?;
    let hbar = cfg.hbar;
    let lambda = thermal_wavelength(hbar, beta, cfg.mass);
    let h = build_hamiltonian(cfg, spec.hamiltonian)?.into_matrix();
    let x = build_position(cfg).into_matrix();
    let p = build_momentum(cfg).into_matrix();
    let a = build_annihilator(cfg, beta)?.into_matrix();
    let xp = &x * &p;
    let h_eff = h + (&xp + xp.adjoint()) * Complex64::from(z * set.mu);
    let rate = z * set.d_pp * lambda * lambda / (hbar * hbar);
    let a_dag = a.adjoint();

    let mut g = Generator::hamiltonian(&h_eff, hbar);
    g.label = "minimal_qbm_single_generator";
    g.left -= &a_dag * &a * Complex64::from(0.5 * rate);
    g.add_sandwich(a, a_dag * Complex64::from(0.5 * rate));
    Ok(g)
}

/// `−(i/ħ)[H,ρ] + (D_pp z λ²/ħ²)(â ρ â† − ½{â†â, ρ})` without the `{x,p}`
/// correction; equal to the bilinear generator with `μ = z D_pp λ²/4ħ²`.
pub fn build_single_lindblad_operator(
    cfg: &HilbertConfig,
    spec: &LiouvillianSpec,
) -> Result<Generator> {
    let (set, beta, z) = minimal_parts(cfg, spec)?;
    let hbar = cfg.hbar;
    let lambda = thermal_wavelength(hbar, beta, cfg.mass);
    let h = build_hamiltonian(cfg, spec.hamiltonian)?.into_matrix();
    let a = build_annihilator(cfg, beta)?.into_matrix();
    let rate = z * set.d_pp * lambda * lambda / (hbar * hbar);
    let a_dag = a.adjoint();
    let mut g = Generator::hamiltonian(&h, hbar);
    g.label = "single_lindblad_operator";
    g.left -= &a_dag * &a * Complex64::from(0.5 * rate);
    g.add_sandwich(a, a_dag * Complex64::from(0.5 * rate));
    Ok(g)
}

/// One-dimensional Boltzmann-gas collision generator
///
/// `−(i/ħ)[H,ρ] + zC Σ_{±q_k} w_k q_k² |t̃(q_k)|²/q_k e^{−βq_k²/8m}
///  [U G ρ G U† − ½{G², ρ}]`
///
/// with `U(q) = exp((i/ħ)q x)`, `G(q) = exp(−(β/4M) q p)` and
/// `C = 8π³m²/(3βħ)`. Exponentials are evaluated through the spectral
/// decompositions of the truncated `x` and `p`.
pub fn build_boltzmann_collision(cfg: &HilbertConfig, spec: &LiouvillianSpec) -> Result<Generator> {
    let GeneratorKind::BoltzmannCollision(ref params) = spec.kind else {
        return Err(wrong_kind("boltzmann_collision", spec));
    };
    params.validate()?;
    let hbar = cfg.hbar;
    let h = build_hamiltonian(cfg, spec.hamiltonian)?.into_matrix();
    let (x_vals, x_vecs) = hermitian_eigen(build_position(cfg).matrix())?;
    let (p_vals, p_vecs) = hermitian_eigen(build_momentum(cfg).matrix())?;
    let p_norm = p_vals.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let b = params.beta / (4.0 * cfg.mass);
    let exponent = b * params.q_max * p_norm;
    if exponent > COLLISION_EXPONENT_LIMIT {
        return Err(Error::ExponentRange {
            value: exponent,
            limit: COLLISION_EXPONENT_LIMIT,
        });
    }

    let mut g = Generator::hamiltonian(&h, hbar);
    g.label = "boltzmann_collision";
    let mut loss = CMatrix::zeros(cfg.dim, cfg.dim);
    for (&qk, &wk) in params.q_nodes.iter().zip(&params.q_weights) {
        let rate = params.fugacity * params.node_rate(qk, wk, hbar);
        if rate == 0.0 {
            continue;
        }
        for q in [qk, -qk] {
            let u = spectral_apply(&x_vals, &x_vecs, |l| Complex64::new(0.0, q * l / hbar).exp());
            let gq = spectral_apply(&p_vals, &p_vecs, |l| Complex64::from((-b * q * l).exp()));
            let g2 = spectral_apply(&p_vals, &p_vecs, |l| Complex64::from((-2.0 * b * q * l).exp()));
            let k = u * gq;
            if k.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
                return Err(Error::NonFinite("collision operator exponential"));
            }
            loss += g2 * Complex64::from(0.5 * rate);
            let k_dag = k.adjoint();
            g.add_sandwich(k, k_dag * Complex64::from(0.5 * rate));
        }
    }
    g.left -= loss;
    Ok(g)
}

/// Column-stacking matrix of `l`: `vec(L[ρ]) = S vec(ρ)` with `vec(ρ)_{i + j·dim} = ρ_ij`.
pub fn superoperator_matrix(l: &dyn Liouvillian) -> Result<CMatrix> {
    let dim = l.dim();
    let size = dim * dim;
    if size > SUPEROPERATOR_LIMIT {
        return Err(Error::SuperoperatorTooLarge {
            size,
            limit: SUPEROPERATOR_LIMIT,
        });
    }
    let mut s = CMatrix::zeros(size, size);
    let mut basis = CMatrix::zeros(dim, dim);
    for j in 0..dim {
        for i in 0..dim {
            basis[(i, j)] = Complex64::from(1.0);
            let image = l.apply(&basis);
            s.column_mut(i + j * dim).copy_from_slice(image.as_slice());
            basis[(i, j)] = Complex64::from(0.0);
        }
    }
    Ok(s)
}

/// Applies a superoperator matrix to `ρ`.
pub fn apply_superoperator(s: &CMatrix, rho: &CMatrix) -> CMatrix {
    let dim = rho.nrows();
    let v = nalgebra::DVector::from_column_slice(rho.as_slice());
    let out = s * v;
    CMatrix::from_column_slice(dim, dim, out.as_slice())
}

/// Eigenvalues of a superoperator matrix (complex Schur form).
pub fn superoperator_spectrum(s: &CMatrix) -> Result<Vec<Complex64>> {
    if s.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
        return Err(Error::NonFinite("superoperator"));
    }
    let schur = nalgebra::Schur::new(s.clone());
    let (_, t) = schur.unpack();
    Ok((0..t.nrows()).map(|k| t[(k, k)]).collect())
}

/// Singular values of a superoperator matrix, ascending.
pub fn singular_values(s: &CMatrix) -> Vec<f64> {
    let mut sv: Vec<f64> = s.clone().svd(false, false).singular_values.iter().copied().collect();
    sv.sort_by(f64::total_cmp);
    sv
}

/// `max_ij |L₁[ρ] − L₂[ρ]|`.
pub fn action_distance(a: &dyn Liouvillian, b: &dyn Liouvillian, rho: &CMatrix) -> f64 {
    max_abs(&(a.apply(rho) - b.apply(rho)))
}
