// SPDX-License-Identifier: Apache-2.0

//! Numerical laboratory for quantum Brownian motion.
//!
//! The crate builds master-equation generators for a test particle in a gas
//! (Caldeira-Leggett, general bilinear Lindblad, the minimal completely
//! positive generator and the Boltzmann-gas collision generator), propagates
//! density matrices under them, and cross-checks the quantum momentum
//! statistics against a classical velocity-space Fokker-Planck solver.
//!
//! Everything runs in a truncated harmonic-oscillator number basis. All
//! products are products of truncated matrices, so trace identities such as
//! `Tr [A, B] = 0` hold exactly at finite dimension.

pub mod coeffs;
pub mod correspondence;
pub mod error;
pub mod fokker_planck;
pub mod liouvillian;
pub mod operators;
pub mod propagation;
pub mod quadrature;
pub mod states;
pub mod structure_factor;

pub use error::{Error, Result};

/// Dense complex matrix used for operators and density matrices.
pub type CMatrix = nalgebra::DMatrix<num_complex::Complex64>;
pub use num_complex::Complex64;
