//! Two independent label checks: the sign rule on the sampled rate
//! functions, and classification of rates recovered from the Choi series.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::spec::ChannelSpec;
use crate::choi::{recover_canonical_rates, Result};
use crate::ClassLabel;

/// Grid spacing for both audits.
pub const AUDIT_SPACING: f64 = 1e-3;

const SIGN_RULE_TOL: f64 = 1e-12;

// Central differences on the 1e-3 grid bias recovered rates by about
// h²·γ''/6, a few 1e-6 for the sampled frequencies; both thresholds sit well
// above that and well below the smallest rate excursions of each class.
const RECOVERED_NEGATIVE_TOL: f64 = 1e-4;
const RECOVERED_CONSTANT_TOL: f64 = 1e-4;

fn audit_grid(t_end: f64) -> Vec<f64> {
    let n = (t_end / AUDIT_SPACING).round().max(2.0) as usize;
    (0..=n).map(|i| t_end * i as f64 / n as f64).collect()
}

/// Semigroup iff every rate is of constant kind; non-Markovian iff some rate
/// dips below −1e-12 on the audit grid over [0, t_end]; Markovian otherwise.
pub fn sign_rule_label(spec: &ChannelSpec, t_end: f64) -> ClassLabel {
    if spec.has_constant_rates() {
        return ClassLabel::Semigroup;
    }
    let negative = audit_grid(t_end)
        .into_iter()
        .any(|t| spec.rates_at(t).into_iter().any(|g| g < -SIGN_RULE_TOL));
    if negative { ClassLabel::NonMarkovian } else { ClassLabel::Markovian }
}

/// Label implied by the canonical rates recovered from the closed-form Choi
/// series on the audit grid.
pub fn recovered_label(spec: &ChannelSpec, t_end: f64) -> Result<ClassLabel> {
    let times = audit_grid(t_end);
    let rates = recover_canonical_rates(&spec.choi_series(&times), &times)?;
    Ok(if rates.min_rate() < -RECOVERED_NEGATIVE_TOL {
        ClassLabel::NonMarkovian
    } else if rates.max_variation() <= RECOVERED_CONSTANT_TOL {
        ClassLabel::Semigroup
    } else {
        ClassLabel::Markovian
    })
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub total: usize,
    pub sign_rule_agree: usize,
    pub recovered_agree: usize,
    /// Samples whose recovery failed (singular or inconsistent map).
    pub recovery_errors: usize,
    /// Indices where either check disagrees with the stored label.
    pub mismatches: Vec<usize>,
}

impl AuditReport {
    pub fn sign_rule_rate(&self) -> f64 {
        self.sign_rule_agree as f64 / self.total.max(1) as f64
    }

    pub fn recovered_rate(&self) -> f64 {
        self.recovered_agree as f64 / self.total.max(1) as f64
    }
}

/// Runs both checks on every spec in parallel.
pub fn audit_labels(specs: &[ChannelSpec], t_end: f64) -> AuditReport {
    let outcomes: Vec<(bool, Option<bool>)> = specs
        .par_iter()
        .map(|s| {
            let sign = sign_rule_label(s, t_end) == s.label;
            let rec = recovered_label(s, t_end).ok().map(|l| l == s.label);
            (sign, rec)
        })
        .collect();
    let mut report = AuditReport { total: specs.len(), ..AuditReport::default() };
    for (i, (sign, rec)) in outcomes.into_iter().enumerate() {
        report.sign_rule_agree += usize::from(sign);
        report.recovered_agree += usize::from(rec == Some(true));
        report.recovery_errors += usize::from(rec.is_none());
        if !sign || rec != Some(true) {
            report.mismatches.push(i);
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{sample_channel, Family};

    #[test]
    fn every_family_and_class_passes_both_checks() {
        for f in [Family::Dephasing, Family::DephasingRB, Family::Pauli, Family::PauliRB, Family::Gad] {
            for l in ClassLabel::ALL {
                for seed in 0..3 {
                    let s = sample_channel(f, l, seed);
                    assert_eq!(sign_rule_label(&s, 3.0), l, "{s:?}");
                    assert_eq!(recovered_label(&s, 3.0).unwrap(), l, "{s:?}");
                }
            }
        }
    }
}
