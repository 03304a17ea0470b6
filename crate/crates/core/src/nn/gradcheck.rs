use ndarray::{ArrayView2, ArrayView3};
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::params::ModelParams;
use super::{NnError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GradCheckReport {
    pub checked: usize,
    pub max_relative_error: f64,
    /// Flattened index of the worst parameter.
    pub worst_index: usize,
}

/// Compares analytic gradients with central differences
/// (L(θ+ε) − L(θ−ε)) / 2ε on `count` parameters drawn without replacement
/// (all of them if the model is smaller). The relative error is
/// |gₐ − gₙ| / max(|gₐ|, |gₙ|, 1e-8).
pub fn grad_check(
    model: &ModelParams,
    x: ArrayView3<'_, f64>,
    targets: ArrayView2<'_, f64>,
    epsilon: f64,
    count: usize,
    seed: u64,
) -> Result<GradCheckReport> {
    if !(1e-7..=1e-4).contains(&epsilon) {
        return Err(NnError::Argument(format!("epsilon {epsilon} outside [1e-7, 1e-4]")));
    }
    let analytic = model.loss_and_grad(x, targets)?.grad;
    let base = model.flatten();
    let n = base.len();
    let indices: Vec<usize> = if count >= n {
        (0..n).collect()
    } else {
        sample(&mut ChaCha8Rng::seed_from_u64(seed), n, count).into_vec()
    };

    let mut probe = model.clone();
    let mut theta = base.clone();
    let mut report = GradCheckReport { checked: indices.len(), max_relative_error: 0.0, worst_index: 0 };
    for &i in &indices {
        theta[i] = base[i] + epsilon;
        probe.assign(&theta)?;
        let plus = probe.loss(x, targets)?;
        theta[i] = base[i] - epsilon;
        probe.assign(&theta)?;
        let minus = probe.loss(x, targets)?;
        theta[i] = base[i];

        let numeric = (plus - minus) / (2.0 * epsilon);
        let a = analytic[i];
        let rel = (a - numeric).abs() / a.abs().max(numeric.abs()).max(1e-8);
        if rel > report.max_relative_error {
            report.max_relative_error = rel;
            report.worst_index = i;
        }
    }
    Ok(report)
}
