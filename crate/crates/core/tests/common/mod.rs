// SPDX-License-Identifier: Apache-2.0

#![allow(dead_code)]

use qbm_core::{CMatrix, Complex64};

/// splitmix64 stream of uniforms in [-0.5, 0.5).
pub struct Rng(u64);

impl Rng {
    pub fn new(seed: u64) -> Self {
        Self(seed)
    }

    pub fn uniform(&mut self) -> f64 {
        self.0 = self.0.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        ((z ^ (z >> 31)) >> 11) as f64 / (1u64 << 53) as f64 - 0.5
    }

    pub fn complex_matrix(&mut self, dim: usize) -> CMatrix {
        CMatrix::from_fn(dim, dim, |_, _| Complex64::new(self.uniform(), self.uniform()))
    }

    pub fn hermitian(&mut self, dim: usize) -> CMatrix {
        let a = self.complex_matrix(dim);
        (&a + a.adjoint()) * Complex64::from(0.5)
    }

    /// Random full-rank density matrix `AA†/Tr(AA†)`.
    pub fn density(&mut self, dim: usize) -> CMatrix {
        let a = self.complex_matrix(dim);
        let m = &a * a.adjoint();
        let tr = m.trace();
        m / tr
    }

    /// Haar-like unitary from the QR factor of a random complex matrix.
    pub fn unitary(&mut self, dim: usize) -> CMatrix {
        self.complex_matrix(dim).qr().q()
    }
}

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Least-squares slope of `ln|y|` against `t`.
pub fn log_slope(t: &[f64], y: &[f64]) -> f64 {
    let n = t.len() as f64;
    let ly: Vec<f64> = y.iter().map(|v| v.abs().ln()).collect();
    let mt = t.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let cov: f64 = t.iter().zip(&ly).map(|(a, b)| (a - mt) * (b - my)).sum();
    let var: f64 = t.iter().map(|a| (a - mt) * (a - mt)).sum();
    cov / var
}
