use serde::{Deserialize, Serialize};

use super::{ChoiError, Result};

/// Functional form of a time-dependent decay rate γ(t).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RateKind {
    /// γ(t) = a
    Constant,
    /// γ(t) = a·tanh t
    TanhScaled,
    /// γ(t) = sin²(bt)
    SinSquared,
    /// γ(t) = sin(bt)
    Sine,
    /// γ(t) = −a·tanh t
    NegTanh,
}

impl RateKind {
    pub fn name(self) -> &'static str {
        match self {
            RateKind::Constant => "constant",
            RateKind::TanhScaled => "tanh",
            RateKind::SinSquared => "sin2",
            RateKind::Sine => "sin",
            RateKind::NegTanh => "negtanh",
        }
    }
}

/// A decay rate γ(t) together with its amplitude `a` or frequency `b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayRateSpec {
    kind: RateKind,
    coeff: f64,
}

impl DecayRateSpec {
    /// Validates the coefficient against the range its kind is sampled from.
    /// Constant rates admit [0, 2) so that the eternal Pauli scenario
    /// (two constant rates a ≥ 1 paired with −a·tanh t) is representable.
    pub fn new(kind: RateKind, coeff: f64) -> Result<Self> {
        let ok = coeff.is_finite()
            && match kind {
                RateKind::Constant => (0.0..2.0).contains(&coeff),
                RateKind::TanhScaled => (0.0..1.0).contains(&coeff),
                RateKind::SinSquared | RateKind::Sine => (2.0..4.0).contains(&coeff),
                RateKind::NegTanh => coeff >= 1.0,
            };
        if ok {
            Ok(Self { kind, coeff })
        } else {
            Err(ChoiError::Parameter(format!(
                "coefficient {coeff} out of range for {} rate",
                kind.name()
            )))
        }
    }

    pub fn constant(a: f64) -> Result<Self> {
        Self::new(RateKind::Constant, a)
    }

    pub fn kind(&self) -> RateKind {
        self.kind
    }

    pub fn coeff(&self) -> f64 {
        self.coeff
    }

    /// γ(t).
    pub fn rate(&self, t: f64) -> f64 {
        let k = self.coeff;
        match self.kind {
            RateKind::Constant => k,
            RateKind::TanhScaled => k * t.tanh(),
            RateKind::SinSquared => (k * t).sin().powi(2),
            RateKind::Sine => (k * t).sin(),
            RateKind::NegTanh => -k * t.tanh(),
        }
    }

    /// Γ(t) = ∫₀ᵗ γ(s) ds in closed form.
    pub fn integral(&self, t: f64) -> f64 {
        let k = self.coeff;
        match self.kind {
            RateKind::Constant => k * t,
            RateKind::TanhScaled => k * ln_cosh(t),
            RateKind::SinSquared => t / 2.0 - (2.0 * k * t).sin() / (4.0 * k),
            RateKind::Sine => (1.0 - (k * t).cos()) / k,
            RateKind::NegTanh => -k * ln_cosh(t),
        }
    }
}

/// Γ(t) for a decay-rate spec. Fails for negative or non-finite `t`.
pub fn gamma_integral(spec: &DecayRateSpec, t: f64) -> Result<f64> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(ChoiError::Parameter(format!("time {t} must be finite and ≥ 0")));
    }
    Ok(spec.integral(t))
}

// ln cosh t without overflow for large |t|.
fn ln_cosh(t: f64) -> f64 {
    let a = t.abs();
    a + (-2.0 * a).exp().ln_1p() - std::f64::consts::LN_2
}
