use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::choi::{
    choi_dephasing_rb, choi_gad, choi_pauli, paulis, rotate_choi, sigma_minus, sigma_plus,
    BlochAxis, ChoiMatrix, DecayRateSpec, Dissipator, EulerAngles, GadSchedule, RateKind,
};
use crate::ClassLabel;

/// Channel family. `Dephasing` is the unrotated special case of
/// `DephasingRB` with the axis pinned to z.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    Dephasing,
    DephasingRB,
    Pauli,
    PauliRB,
    Gad,
}

impl Family {
    /// The four families mixed in the combined dataset.
    pub const ALL: [Family; 4] = [Family::DephasingRB, Family::Pauli, Family::PauliRB, Family::Gad];

    pub fn name(self) -> &'static str {
        match self {
            Family::Dephasing => "dephasing",
            Family::DephasingRB => "dephasing-rb",
            Family::Pauli => "pauli",
            Family::PauliRB => "pauli-rb",
            Family::Gad => "gad",
        }
    }

    /// Parses a comma-separated family list; `all` expands to [`Family::ALL`].
    pub fn parse_list(s: &str) -> Result<Vec<Family>, String> {
        let mut out = Vec::new();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            if part.eq_ignore_ascii_case("all") {
                out.extend(Family::ALL);
            } else {
                out.push(part.parse()?);
            }
        }
        if out.is_empty() {
            return Err("empty family list".into());
        }
        Ok(out)
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "dephasing" | "d" => Ok(Family::Dephasing),
            "dephasing-rb" | "d-rb" => Ok(Family::DephasingRB),
            "pauli" | "p" => Ok(Family::Pauli),
            "pauli-rb" | "p-rb" => Ok(Family::PauliRB),
            "gad" => Ok(Family::Gad),
            other => Err(format!("unknown channel family `{other}`")),
        }
    }
}

/// Rate content of a channel instance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ChannelKind {
    Dephasing { axis: BlochAxis, rate: DecayRateSpec },
    Pauli { rates: [DecayRateSpec; 3], rotation: Option<EulerAngles> },
    Gad(GadSchedule),
}

/// A sampled channel instance with its ground-truth label.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelSpec {
    pub family: Family,
    pub label: ClassLabel,
    pub kind: ChannelKind,
    pub seed: u64,
}

impl ChannelSpec {
    /// Closed-form Choi state at time t.
    pub fn choi_at(&self, t: f64) -> ChoiMatrix {
        match &self.kind {
            ChannelKind::Dephasing { axis, rate } => {
                choi_dephasing_rb(axis.theta, axis.varphi, rate.integral(t))
            }
            ChannelKind::Pauli { rates, rotation } => {
                let c = choi_pauli(rates[0].integral(t), rates[1].integral(t), rates[2].integral(t));
                match rotation {
                    Some(r) => rotate_choi(&c, r),
                    None => c,
                }
            }
            ChannelKind::Gad(s) => choi_gad(s.params_at(t)),
        }
    }

    pub fn choi_series(&self, times: &[f64]) -> Vec<ChoiMatrix> {
        times.iter().map(|&t| self.choi_at(t)).collect()
    }

    /// Canonical decay rates γₖ(t) that generate this channel.
    pub fn rates_at(&self, t: f64) -> Vec<f64> {
        match &self.kind {
            ChannelKind::Dephasing { rate, .. } => vec![rate.rate(t)],
            ChannelKind::Pauli { rates, .. } => rates.iter().map(|r| r.rate(t)).collect(),
            ChannelKind::Gad(s) => s.rates_at(t).to_vec(),
        }
    }

    pub fn has_constant_rates(&self) -> bool {
        match &self.kind {
            ChannelKind::Dephasing { rate, .. } => rate.kind() == RateKind::Constant,
            ChannelKind::Pauli { rates, .. } => rates.iter().all(|r| r.kind() == RateKind::Constant),
            ChannelKind::Gad(s) => matches!(s, GadSchedule::Semigroup { .. }),
        }
    }

    /// Lindblad operators normalized in the σ/√2 basis, each paired with its
    /// rate, for the numerical oracle.
    pub fn dissipators(&self) -> Vec<Dissipator<'static>> {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        match self.kind {
            ChannelKind::Dephasing { axis, rate } => {
                vec![Dissipator::new(axis.pauli_operator().scale(s), move |t| rate.rate(t))]
            }
            ChannelKind::Pauli { rates, rotation } => paulis()
                .iter()
                .zip(rates)
                .map(|(p, r)| {
                    let op = match rotation {
                        Some(rot) => rot.conjugate(p),
                        None => *p,
                    };
                    Dissipator::new(op.scale(s), move |t| r.rate(t))
                })
                .collect(),
            ChannelKind::Gad(sched) => vec![
                Dissipator::new(sigma_minus(), move |t| sched.rates_at(t)[0]),
                Dissipator::new(sigma_plus(), move |t| sched.rates_at(t)[1]),
            ],
        }
    }
}
