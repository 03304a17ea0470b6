//! Choi states of single-qubit dissipative channels.
//!
//! Matrices are 4×4 in the computational basis |00⟩,|01⟩,|10⟩,|11⟩ with the
//! channel acting on the first tensor factor. Bell-basis quantities are always
//! ordered (φ⁺, φ⁻, ψ⁺, ψ⁻).

mod channels;
mod oracle;
mod rates;
mod recovery;
mod rotation;
mod state;

pub use channels::{
    choi_dephasing_rb, choi_gad, choi_gad_published, choi_pauli, gad_kraus, gad_trajectory,
    GadParams, GadSchedule,
};
pub use oracle::{evolve_choi, evolve_choi_numerical, Dissipator, ORACLE_STEP};
pub use rates::{gamma_integral, DecayRateSpec, RateKind};
pub use recovery::{
    decoherence_matrix, recover_canonical_rates, transfer_matrix, RateSeries, MAX_CONDITION,
};
pub use rotation::{rotate_choi, BlochAxis, EulerAngles};
pub use state::{bell_basis, bell_diagonal, bell_matrix, BellDiagonal, ChoiMatrix, PHI_PLUS};

use nalgebra::{Matrix2, Matrix4};
use num_complex::Complex64;
use thiserror::Error;

pub type C64 = Complex64;
pub type Op2 = Matrix2<C64>;
pub type Op4 = Matrix4<C64>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ChoiError {
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("integration lost accuracy at t = {time}: drift {drift:e}")]
    IntegrationAccuracy { time: f64, drift: f64 },
    #[error("transfer matrix not invertible at t = {time} (condition number {condition:e})")]
    NonInvertibleMap { time: f64, condition: f64 },
    #[error("decoherence matrix not Hermitian at t = {time} (deviation {deviation:e})")]
    Inconsistent { time: f64, deviation: f64 },
    #[error("Choi invariant violated: {0}")]
    Invariant(String),
}

pub type Result<T> = std::result::Result<T, ChoiError>;

pub(crate) fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn identity2() -> Op2 {
    Op2::identity()
}

pub fn sigma_x() -> Op2 {
    Op2::new(c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.))
}

pub fn sigma_y() -> Op2 {
    Op2::new(c(0., 0.), c(0., -1.), c(0., 1.), c(0., 0.))
}

pub fn sigma_z() -> Op2 {
    Op2::new(c(1., 0.), c(0., 0.), c(0., 0.), c(-1., 0.))
}

/// σ₋ = |0⟩⟨1|.
pub fn sigma_minus() -> Op2 {
    Op2::new(c(0., 0.), c(1., 0.), c(0., 0.), c(0., 0.))
}

/// σ₊ = |1⟩⟨0|.
pub fn sigma_plus() -> Op2 {
    Op2::new(c(0., 0.), c(0., 0.), c(1., 0.), c(0., 0.))
}

pub fn paulis() -> [Op2; 3] {
    [sigma_x(), sigma_y(), sigma_z()]
}

/// Kronecker product of two 2×2 operators.
pub fn kron(a: &Op2, b: &Op2) -> Op4 {
    Op4::from_fn(|r, col| a[(r / 2, col / 2)] * b[(r % 2, col % 2)])
}
