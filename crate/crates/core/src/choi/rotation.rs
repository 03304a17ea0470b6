use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use super::{c, kron, sigma_x, sigma_y, sigma_z, ChoiMatrix, Op2};

/// ZYZ Euler angles of R(α, β, γ) = R_z(γ) R_y(β) R_z(α).
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct EulerAngles {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

/// Polar angles of a dephasing axis n on the Bloch sphere.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct BlochAxis {
    pub theta: f64,
    pub varphi: f64,
}

impl BlochAxis {
    pub fn new(theta: f64, varphi: f64) -> Self {
        Self { theta, varphi }
    }

    pub fn unit_vector(&self) -> [f64; 3] {
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.varphi.sin_cos();
        [st * cp, st * sp, ct]
    }

    /// σ·n.
    pub fn pauli_operator(&self) -> Op2 {
        let [x, y, z] = self.unit_vector();
        sigma_x().scale(x) + sigma_y().scale(y) + sigma_z().scale(z)
    }
}

fn rz(angle: f64) -> Op2 {
    let h = angle / 2.0;
    Op2::new(c(h.cos(), -h.sin()), c(0., 0.), c(0., 0.), c(h.cos(), h.sin()))
}

fn ry(angle: f64) -> Op2 {
    let (s, co) = (angle / 2.0).sin_cos();
    Op2::new(c(co, 0.), c(-s, 0.), c(s, 0.), c(co, 0.))
}

impl EulerAngles {
    pub fn new(alpha: f64, beta: f64, gamma: f64) -> Self {
        Self { alpha, beta, gamma }
    }

    /// The SU(2) matrix R_z(γ) R_y(β) R_z(α).
    pub fn matrix(&self) -> Op2 {
        rz(self.gamma) * ry(self.beta) * rz(self.alpha)
    }

    /// Angles of an SU(2) matrix, up to the global sign that conjugation
    /// cannot see. α and γ are wrapped into [0, 2π), β lies in [0, π].
    pub fn from_matrix(r: &Op2) -> Self {
        let beta = 2.0 * r[(1, 0)].norm().atan2(r[(0, 0)].norm());
        // R₁₁ = e^{i(α+γ)/2} cos(β/2), R₁₀ = e^{i(γ−α)/2} sin(β/2)
        let (sum, diff) = if r[(1, 0)].norm() < 1e-12 {
            (2.0 * r[(1, 1)].arg(), 0.0)
        } else if r[(0, 0)].norm() < 1e-12 {
            (0.0, 2.0 * r[(1, 0)].arg())
        } else {
            (2.0 * r[(1, 1)].arg(), 2.0 * r[(1, 0)].arg())
        };
        Self {
            alpha: ((sum - diff) / 2.0).rem_euclid(TAU),
            beta,
            gamma: ((sum + diff) / 2.0).rem_euclid(TAU),
        }
    }

    /// Angles of `self` applied after `first`: R = R_self · R_first.
    pub fn compose(&self, first: &EulerAngles) -> EulerAngles {
        EulerAngles::from_matrix(&(self.matrix() * first.matrix()))
    }

    /// R O R†.
    pub fn conjugate(&self, op: &Op2) -> Op2 {
        let r = self.matrix();
        r * op * r.adjoint()
    }
}

/// (R ⊗ R̄) C (R ⊗ R̄)†: the Choi state of the channel whose Lindblad
/// operators are all conjugated by R.
pub fn rotate_choi(choi: &ChoiMatrix, angles: &EulerAngles) -> ChoiMatrix {
    let r = angles.matrix();
    let u = kron(&r, &r.conjugate());
    ChoiMatrix::from_matrix_unchecked(u * choi.matrix() * u.adjoint())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::choi::{bell_diagonal, choi_pauli};
    use std::f64::consts::{FRAC_PI_2, LN_2};

    #[test]
    fn identity_rotation_is_a_no_op() {
        let m = choi_pauli(0.3, 0.8, 1.1);
        let r = rotate_choi(&m, &EulerAngles::default());
        assert!(r.max_abs_diff(&m) < 1e-15);
    }

    #[test]
    fn x_axis_to_z_axis() {
        let rot = EulerAngles::new(0.0, FRAC_PI_2, 0.0);
        let r = rotate_choi(&choi_pauli(LN_2, 0.0, 0.0), &rot);
        let d = bell_diagonal(&r).0;
        for (x, want) in d.iter().zip([0.75, 0.25, 0.0, 0.0]) {
            assert!((x - want).abs() < 1e-14, "{d:?}");
        }
        let conj = rot.conjugate(&sigma_x());
        assert!((conj + sigma_z()).iter().all(|z| z.norm() < 1e-15));
    }

    #[test]
    fn matrix_round_trips_through_angles() {
        let cases = [(0.3, 1.2, 5.0), (6.0, 0.0, 1.0), (1.0, std::f64::consts::PI, 2.0), (4.0, 2.5, 0.1)];
        for (a, b, g) in cases {
            let e = EulerAngles::new(a, b, g);
            let back = EulerAngles::from_matrix(&e.matrix());
            let (m1, m2) = (e.matrix(), back.matrix());
            let same = (m1 - m2).iter().all(|z| z.norm() < 1e-12);
            let flipped = (m1 + m2).iter().all(|z| z.norm() < 1e-12);
            assert!(same || flipped, "{e:?} -> {back:?}");
        }
    }

    #[test]
    fn axis_operator_is_unit_pauli() {
        let ax = BlochAxis::new(0.7, 2.1);
        let op = ax.pauli_operator();
        assert!((op * op - Op2::identity()).iter().all(|z| z.norm() < 1e-15));
    }
}
