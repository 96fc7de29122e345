// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("invalid density matrix: {0}")]
    InvalidState(String),

    #[error("generator kind mismatch: builder expects `{expected}`, spec holds `{got}`")]
    WrongKind {
        expected: &'static str,
        got: &'static str,
    },

    #[error("quadrature did not converge: estimate {estimate:e}, error {error:e}")]
    Quadrature { estimate: f64, error: f64 },

    #[error("superoperator of size {size} exceeds the limit {limit}")]
    SuperoperatorTooLarge { size: usize, limit: usize },

    #[error("step size underflow at t = {t}")]
    StepSizeUnderflow { t: f64 },

    #[error("degenerate null space: {dim} singular values below tolerance")]
    DegenerateNullSpace { dim: usize },

    #[error("stability bound violated: dt = {dt:e} exceeds {bound:e}")]
    StabilityBound { dt: f64, bound: f64 },

    #[error("exponent range {value:.3} exceeds {limit}; reduce q_max or beta")]
    ExponentRange { value: f64, limit: f64 },
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
