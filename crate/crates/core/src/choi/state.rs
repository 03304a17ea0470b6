use nalgebra::Vector4;
use serde::{Deserialize, Serialize};

use super::{c, ChoiError, Op4, Result, C64};

pub const TRACE_TOL: f64 = 1e-12;
pub const HERMITIAN_TOL: f64 = 1e-12;
pub const PSD_TOL: f64 = -1e-10;

/// Index of φ⁺ in Bell-ordered quantities.
pub const PHI_PLUS: usize = 0;

/// Bell vectors as columns, ordered (φ⁺, φ⁻, ψ⁺, ψ⁻).
pub fn bell_basis() -> Op4 {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let cols = [
        Vector4::new(c(s, 0.), c(0., 0.), c(0., 0.), c(s, 0.)),
        Vector4::new(c(s, 0.), c(0., 0.), c(0., 0.), c(-s, 0.)),
        Vector4::new(c(0., 0.), c(s, 0.), c(s, 0.), c(0., 0.)),
        Vector4::new(c(0., 0.), c(s, 0.), c(-s, 0.), c(0., 0.)),
    ];
    Op4::from_columns(&cols)
}

/// A two-qubit Choi state in the computational basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChoiMatrix(Op4);

impl ChoiMatrix {
    /// Wraps a matrix after checking trace, Hermiticity and positivity.
    pub fn new(m: Op4) -> Result<Self> {
        let choi = Self(m);
        choi.check_invariants()?;
        Ok(choi)
    }

    pub(crate) fn from_matrix_unchecked(m: Op4) -> Self {
        Self(m)
    }

    /// |φ⁺⟩⟨φ⁺|, the Choi state of the identity channel.
    pub fn phi_plus() -> Self {
        let b = bell_basis();
        let v = b.column(0);
        Self(v * v.adjoint())
    }

    pub fn matrix(&self) -> &Op4 {
        &self.0
    }

    pub fn into_matrix(self) -> Op4 {
        self.0
    }

    pub fn trace(&self) -> C64 {
        self.0.trace()
    }

    pub fn hermiticity_error(&self) -> f64 {
        (self.0 - self.0.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Eigenvalues of the Hermitian part, ascending.
    pub fn eigenvalues(&self) -> [f64; 4] {
        let h = (self.0 + self.0.adjoint()).scale(0.5);
        let ev = h.symmetric_eigenvalues();
        let mut out = [ev[0], ev[1], ev[2], ev[3]];
        out.sort_by(f64::total_cmp);
        out
    }

    pub fn check_invariants(&self) -> Result<()> {
        let tr = self.trace();
        if (tr - C64::new(1.0, 0.0)).norm() > TRACE_TOL {
            return Err(ChoiError::Invariant(format!("trace {tr} differs from 1")));
        }
        let herm = self.hermiticity_error();
        if herm > HERMITIAN_TOL {
            return Err(ChoiError::Invariant(format!("Hermiticity error {herm:e}")));
        }
        let min = self.eigenvalues()[0];
        if min < PSD_TOL {
            return Err(ChoiError::Invariant(format!("minimum eigenvalue {min:e}")));
        }
        Ok(())
    }

    /// Largest entrywise modulus of the difference.
    pub fn max_abs_diff(&self, other: &ChoiMatrix) -> f64 {
        (self.0 - other.0).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

/// Bell-basis populations ⟨φⱼ|C|φⱼ⟩ ordered (φ⁺, φ⁻, ψ⁺, ψ⁻).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BellDiagonal(pub [f64; 4]);

impl BellDiagonal {
    pub fn new(components: [f64; 4]) -> Result<Self> {
        let sum: f64 = components.iter().sum();
        let in_range = components.iter().all(|&x| (-1e-12..=1.0 + 1e-12).contains(&x));
        if !in_range || (sum - 1.0).abs() > 1e-12 {
            return Err(ChoiError::Invariant(format!(
                "Bell diagonal {components:?} is not a probability vector"
            )));
        }
        Ok(Self(components))
    }

    pub fn components(&self) -> [f64; 4] {
        self.0
    }

    pub fn sum(&self) -> f64 {
        self.0.iter().sum()
    }
}

/// C expressed in the Bell basis: B†CB.
pub fn bell_matrix(choi: &ChoiMatrix) -> Op4 {
    let b = bell_basis();
    b.adjoint() * choi.matrix() * b
}

pub fn bell_diagonal(choi: &ChoiMatrix) -> BellDiagonal {
    let m = bell_matrix(choi);
    BellDiagonal([m[(0, 0)].re, m[(1, 1)].re, m[(2, 2)].re, m[(3, 3)].re])
}
