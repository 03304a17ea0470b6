use serde::{Deserialize, Serialize};

use super::state::bell_basis;
use super::{c, identity2, kron, ChoiError, ChoiMatrix, Op2, Op4, Result};
use crate::ClassLabel;

// |u⟩⟨v| for two Bell columns.
fn bell_outer(b: &Op4, u: usize, v: usize) -> Op4 {
    b.column(u) * b.column(v).adjoint()
}

/// Choi state of dephasing along n = (sinθ cosφ, sinθ sinφ, cosθ) after an
/// integrated rate Γ, assembled term by term from Bell projectors and
/// coherences.
pub fn choi_dephasing_rb(theta: f64, varphi: f64, gamma: f64) -> ChoiMatrix {
    debug_assert!(gamma >= 0.0, "integrated rate must be non-negative");
    let b = bell_basis();
    let e = (-gamma).exp();
    let keep = (1.0 + e) / 2.0;
    let flip = (1.0 - e) / 2.0;
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = varphi.sin_cos();
    let p = |u, v| bell_outer(&b, u, v);

    let mut rotated = p(1, 1).scale(ct * ct)
        + p(2, 2).scale(st * st * cp * cp)
        + p(3, 3).scale(st * st * sp * sp)
        + (p(1, 2) + p(2, 1)).scale(st * ct * cp);
    rotated += (p(1, 3) - p(3, 1)) * c(0.0, st * ct * sp);
    rotated += (p(2, 3) - p(3, 2)) * c(0.0, st * st * sp * cp);

    ChoiMatrix::from_matrix_unchecked(p(0, 0).scale(keep) + rotated.scale(flip))
}

/// Bell-diagonal Choi state of the Pauli channel with integrated rates Γ₁, Γ₂, Γ₃
/// attached to σx, σy, σz.
pub fn choi_pauli(g1: f64, g2: f64, g3: f64) -> ChoiMatrix {
    let e12 = (-g1 - g2).exp();
    let e13 = (-g1 - g3).exp();
    let e23 = (-g2 - g3).exp();
    let weights = [
        (1.0 + e12 + e13 + e23) / 4.0,
        (1.0 + e12 - e13 - e23) / 4.0,
        (1.0 - e12 - e13 + e23) / 4.0,
        (1.0 - e12 + e13 - e23) / 4.0,
    ];
    let b = bell_basis();
    let m = weights
        .iter()
        .enumerate()
        .fold(Op4::zeros(), |acc, (k, &w)| acc + bell_outer(&b, k, k).scale(w));
    ChoiMatrix::from_matrix_unchecked(m)
}

/// Parameters of a generalized amplitude damping channel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GadParams {
    pub p: f64,
    pub lambda: f64,
}

impl GadParams {
    pub fn new(p: f64, lambda: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) || !(0.0..=1.0).contains(&lambda) {
            return Err(ChoiError::Parameter(format!(
                "GAD parameters p = {p}, λ = {lambda} must lie in [0, 1]"
            )));
        }
        Ok(Self { p, lambda })
    }
}

/// The four GAD Kraus operators E₀..E₃.
pub fn gad_kraus(params: GadParams) -> [Op2; 4] {
    let GadParams { p, lambda } = params;
    let sp = p.sqrt();
    let sq = (1.0 - p).sqrt();
    let r = (1.0 - lambda).sqrt();
    let sl = lambda.sqrt();
    let m = |a: f64, b: f64, cc: f64, d: f64| Op2::new(c(a, 0.), c(b, 0.), c(cc, 0.), c(d, 0.));
    [
        m(sp, 0.0, 0.0, sp * r),
        m(0.0, sp * sl, 0.0, 0.0),
        m(sq * r, 0.0, 0.0, sq),
        m(0.0, 0.0, sq * sl, 0.0),
    ]
}

/// GAD Choi state Σᵢ (Eᵢ⊗I)|φ⁺⟩⟨φ⁺|(Eᵢ⊗I)†.
///
/// In the Bell basis the populations are ((1+√(1−λ))²/4, (1−√(1−λ))²/4, λ/4, λ/4)
/// independent of p; p enters only through the real φ⁺φ⁻ coherence
/// (2p−1)λ/4 and the real ψ⁺ψ⁻ coherence (2p−1)λ/4.
pub fn choi_gad(params: GadParams) -> ChoiMatrix {
    let phi = ChoiMatrix::phi_plus().into_matrix();
    let id = identity2();
    let m = gad_kraus(params).iter().fold(Op4::zeros(), |acc, e| {
        let k = kron(e, &id);
        acc + k * phi * k.adjoint()
    });
    ChoiMatrix::from_matrix_unchecked(m)
}

/// The closed-form GAD matrix as commonly printed, with p-independent φ⁺φ⁻
/// coherence λ/4 and imaginary ψ⁺ψ⁻ coherences ±i(1−2p)λ/4.
///
/// Its populations agree with [`choi_gad`] but its reduced state on the
/// reference qubit is not I/2 for λ > 0, so it is not the Choi state of a
/// trace-preserving map. Kept for comparison only; nothing else uses it.
pub fn choi_gad_published(params: GadParams) -> ChoiMatrix {
    let GadParams { p, lambda } = params;
    let b = bell_basis();
    let r = (1.0 - lambda).sqrt();
    let q = |u, v| bell_outer(&b, u, v);
    let mut m = q(0, 0).scale((1.0 + r).powi(2) / 4.0) + q(1, 1).scale((1.0 - r).powi(2) / 4.0);
    let mut tail = q(2, 2) + q(3, 3) + q(0, 1) + q(1, 0);
    tail += (q(2, 3) - q(3, 2)) * c(0.0, 1.0 - 2.0 * p);
    m += tail.scale(lambda / 4.0);
    ChoiMatrix::from_matrix_unchecked(m)
}

/// Time dependence of (p, λ) for each GAD class.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum GadSchedule {
    /// Constant γ₁, γ₂: p = γ₁/(γ₁+γ₂), λ = 1 − e^{−(γ₁+γ₂)t}.
    Semigroup { gamma1: f64, gamma2: f64 },
    /// Constant p, λ = tanh(bt), b ∈ [1/2, 1).
    Markovian { p: f64, b: f64 },
    /// Constant p, λ = ½ sin²(bt), b ∈ [2, 4).
    NonMarkovian { p: f64, b: f64 },
}

impl GadSchedule {
    /// Builds a schedule from class-specific coefficients: (γ₁, γ₂) for the
    /// semigroup class, (p, b) otherwise.
    pub fn new(class: ClassLabel, coeffs: &[f64]) -> Result<Self> {
        let [x, y] = coeffs else {
            return Err(ChoiError::Parameter(format!(
                "GAD schedule takes two coefficients, got {}",
                coeffs.len()
            )));
        };
        let (x, y) = (*x, *y);
        let bad = |what: &str| Err(ChoiError::Parameter(format!("{what} for {class} GAD")));
        match class {
            ClassLabel::Semigroup => {
                if !(x.is_finite() && y.is_finite() && x >= 0.0 && y >= 0.0) {
                    return bad("rates must be finite and non-negative");
                }
                Ok(Self::Semigroup { gamma1: x, gamma2: y })
            }
            ClassLabel::Markovian => {
                if !(0.0..=1.0).contains(&x) || !(0.5..1.0).contains(&y) {
                    return bad("need p ∈ [0,1] and b ∈ [1/2, 1)");
                }
                Ok(Self::Markovian { p: x, b: y })
            }
            ClassLabel::NonMarkovian => {
                if !(0.0..=1.0).contains(&x) || !(2.0..4.0).contains(&y) {
                    return bad("need p ∈ [0,1] and b ∈ [2, 4)");
                }
                Ok(Self::NonMarkovian { p: x, b: y })
            }
        }
    }

    pub fn class(&self) -> ClassLabel {
        match self {
            Self::Semigroup { .. } => ClassLabel::Semigroup,
            Self::Markovian { .. } => ClassLabel::Markovian,
            Self::NonMarkovian { .. } => ClassLabel::NonMarkovian,
        }
    }

    pub fn p(&self) -> f64 {
        match *self {
            Self::Semigroup { gamma1, gamma2 } => {
                let s = gamma1 + gamma2;
                // 0/0 at zero total rate; λ ≡ 0 there so p is immaterial.
                if s > 0.0 { gamma1 / s } else { 0.5 }
            }
            Self::Markovian { p, .. } | Self::NonMarkovian { p, .. } => p,
        }
    }

    pub fn lambda(&self, t: f64) -> f64 {
        match *self {
            Self::Semigroup { gamma1, gamma2 } => -(-(gamma1 + gamma2) * t).exp_m1(),
            Self::Markovian { b, .. } => (b * t).tanh(),
            Self::NonMarkovian { b, .. } => 0.5 * (b * t).sin().powi(2),
        }
    }

    pub fn params_at(&self, t: f64) -> GadParams {
        GadParams { p: self.p(), lambda: self.lambda(t) }
    }

    /// Total rate γ₁+γ₂ = λ̇/(1−λ) for constant p.
    pub fn total_rate(&self, t: f64) -> f64 {
        match *self {
            Self::Semigroup { gamma1, gamma2 } => gamma1 + gamma2,
            Self::Markovian { b, .. } => b * (1.0 + (b * t).tanh()),
            Self::NonMarkovian { b, .. } => {
                let s = (b * t).sin();
                0.5 * b * (2.0 * b * t).sin() / (1.0 - 0.5 * s * s)
            }
        }
    }

    /// Canonical rates (γ₁ on σ₋, γ₂ on σ₊) at time t.
    pub fn rates_at(&self, t: f64) -> [f64; 2] {
        if let Self::Semigroup { gamma1, gamma2 } = *self {
            return [gamma1, gamma2];
        }
        let p = self.p();
        let total = self.total_rate(t);
        [p * total, (1.0 - p) * total]
    }
}

/// (p, λ) at time t for a class and its coefficients.
pub fn gad_trajectory(class: ClassLabel, coeffs: &[f64], t: f64) -> Result<GadParams> {
    Ok(GadSchedule::new(class, coeffs)?.params_at(t))
}
