//! Recovery of canonical decay rates from a sampled Choi series.
//!
//! Each Choi state is reshuffled into the transfer matrix T(t) acting on
//! row-major vectorized density matrices, vec(AρB) = (A ⊗ Bᵀ) vec(ρ). The
//! generator L = Ṫ T⁻¹ is expanded as Σᵢⱼ cᵢⱼ Fᵢ ⊗ F̄ⱼ over the orthonormal
//! operator basis F = {I, σx, σy, σz}/√2; the 3×3 block cᵢⱼ (i, j ≥ 1) is the
//! decoherence matrix and its eigenvalues are the canonical rates.

use nalgebra::Matrix3;
use serde::{Deserialize, Serialize};

use super::{identity2, kron, paulis, ChoiError, ChoiMatrix, Op2, Op4, Result, C64};

/// Transfer matrices with a larger condition number are treated as singular.
pub const MAX_CONDITION: f64 = 1e12;

const HERMITICITY_TOL: f64 = 1e-6;

/// Canonical decay rates per time point, each triple sorted ascending.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateSeries {
    pub times: Vec<f64>,
    pub rates: Vec<[f64; 3]>,
}

impl RateSeries {
    pub fn min_rate(&self) -> f64 {
        self.rates.iter().flatten().copied().fold(f64::INFINITY, f64::min)
    }

    /// Largest spread max − min over time of any sorted rate.
    pub fn max_variation(&self) -> f64 {
        (0..3)
            .map(|k| {
                let (lo, hi) = self
                    .rates
                    .iter()
                    .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), r| (lo.min(r[k]), hi.max(r[k])));
                hi - lo
            })
            .fold(0.0, f64::max)
    }
}

/// T[(i,j),(a,b)] = Λ(|a⟩⟨b|)ᵢⱼ = 2·C[(i,a),(j,b)].
pub fn transfer_matrix(choi: &ChoiMatrix) -> Op4 {
    let m = choi.matrix();
    Op4::from_fn(|row, col| {
        let (i, j) = (row / 2, row % 2);
        let (a, b) = (col / 2, col % 2);
        m[(2 * i + a, 2 * j + b)] * 2.0
    })
}

fn operator_basis() -> [Op2; 4] {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let [x, y, z] = paulis();
    [identity2().scale(s), x.scale(s), y.scale(s), z.scale(s)]
}

/// Decoherence matrix dᵢⱼ = Tr[(Fᵢ ⊗ F̄ⱼ)† L] for i, j ∈ {x, y, z}.
pub fn decoherence_matrix(generator: &Op4) -> Matrix3<C64> {
    let f = operator_basis();
    Matrix3::from_fn(|i, j| {
        let basis = kron(&f[i + 1], &f[j + 1].conjugate());
        basis.zip_fold(generator, C64::new(0.0, 0.0), |acc, b, l| acc + b.conj() * l)
    })
}

fn condition_number(m: &Op4) -> f64 {
    let sv = m.singular_values();
    let max = sv.max();
    let min = sv.min();
    if min == 0.0 { f64::INFINITY } else { max / min }
}

/// Canonical rates at the interior points of `times`, from central
/// differences of the transfer matrix.
pub fn recover_canonical_rates(series: &[ChoiMatrix], times: &[f64]) -> Result<RateSeries> {
    if series.len() != times.len() {
        return Err(ChoiError::Parameter(format!(
            "{} Choi states for {} times",
            series.len(),
            times.len()
        )));
    }
    if series.len() < 3 {
        return Err(ChoiError::Parameter("need at least three time points".into()));
    }
    if times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(ChoiError::Parameter("times must be strictly increasing".into()));
    }
    let transfers: Vec<Op4> = series.iter().map(transfer_matrix).collect();
    let mut out = RateSeries { times: Vec::with_capacity(times.len() - 2), rates: Vec::new() };
    for i in 1..times.len() - 1 {
        let t = times[i];
        let h1 = t - times[i - 1];
        let h2 = times[i + 1] - t;
        let derivative = transfers[i - 1].scale(-h2 / (h1 * (h1 + h2)))
            + transfers[i].scale((h2 - h1) / (h1 * h2))
            + transfers[i + 1].scale(h1 / (h2 * (h1 + h2)));

        let tm = &transfers[i];
        let condition = condition_number(tm);
        if condition > MAX_CONDITION {
            return Err(ChoiError::NonInvertibleMap { time: t, condition });
        }
        let inverse = tm
            .try_inverse()
            .ok_or(ChoiError::NonInvertibleMap { time: t, condition: f64::INFINITY })?;
        let d = decoherence_matrix(&(derivative * inverse));
        let deviation = (d - d.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if deviation > HERMITICITY_TOL {
            return Err(ChoiError::Inconsistent { time: t, deviation });
        }
        let herm = (d + d.adjoint()).scale(0.5);
        let ev = herm.symmetric_eigenvalues();
        let mut rates = [ev[0], ev[1], ev[2]];
        rates.sort_by(f64::total_cmp);
        out.times.push(t);
        out.rates.push(rates);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::choi::{choi_dephasing_rb, choi_gad, sigma_minus, DecayRateSpec, GadParams, RateKind};

    fn fine_grid(end: f64, h: f64) -> Vec<f64> {
        let n = (end / h).round() as usize;
        (0..=n).map(|i| i as f64 * h).collect()
    }

    #[test]
    fn identity_evolution_has_zero_rates() {
        let times = fine_grid(1.0, 0.1);
        let series = vec![ChoiMatrix::phi_plus(); times.len()];
        let r = recover_canonical_rates(&series, &times).unwrap();
        assert_eq!(r.times.len(), times.len() - 2);
        assert!(r.rates.iter().flatten().all(|x| x.abs() < 1e-10));
    }

    #[test]
    fn semigroup_dephasing_rate() {
        let times = fine_grid(3.0, 1e-3);
        let spec = DecayRateSpec::constant(0.5).unwrap();
        let series: Vec<_> =
            times.iter().map(|&t| choi_dephasing_rb(1.0, 2.0, spec.integral(t))).collect();
        let r = recover_canonical_rates(&series, &times).unwrap();
        for rates in &r.rates {
            assert!((rates[2] - 0.5).abs() < 1e-3);
            assert!(rates[0].abs() < 1e-8 && rates[1].abs() < 1e-8);
        }
    }

    #[test]
    fn oscillating_dephasing_rate_changes_sign() {
        let times = fine_grid(3.0, 1e-3);
        let spec = DecayRateSpec::new(RateKind::Sine, 2.0).unwrap();
        let series: Vec<_> =
            times.iter().map(|&t| choi_dephasing_rb(0.4, 5.0, spec.integral(t))).collect();
        let r = recover_canonical_rates(&series, &times).unwrap();
        for (t, rates) in r.times.iter().zip(&r.rates) {
            // the single nonzero rate is either the largest or the smallest eigenvalue
            let g = if rates[2].abs() > rates[0].abs() { rates[2] } else { rates[0] };
            assert!((g - (2.0 * t).sin()).abs() < 1e-2, "t = {t}: {rates:?}");
        }
        assert!(r.min_rate() < -0.9);
    }

    #[test]
    fn gad_rates_are_recovered() {
        let times = fine_grid(2.0, 1e-3);
        let (g1, g2) = (0.3, 0.6);
        let s = g1 + g2;
        let series: Vec<_> = times
            .iter()
            .map(|&t| choi_gad(GadParams::new(g1 / s, 1.0 - (-s * t).exp()).unwrap()))
            .collect();
        let r = recover_canonical_rates(&series, &times).unwrap();
        for rates in &r.rates {
            assert!(rates[0].abs() < 1e-6);
            assert!((rates[1] - g1).abs() < 1e-5 && (rates[2] - g2).abs() < 1e-5, "{rates:?}");
        }
        // σ± are unit vectors in the σ/√2 basis, so the rates need no rescaling
        let gen = kron(&sigma_minus(), &sigma_minus().conjugate());
        assert!((decoherence_matrix(&gen).trace().re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn singular_transfer_matrix_is_reported() {
        let mixed = ChoiMatrix::new(Op4::identity().scale(0.25)).unwrap();
        let series = vec![ChoiMatrix::phi_plus(), mixed, mixed];
        let err = recover_canonical_rates(&series, &[0.0, 1.0, 2.0]).unwrap_err();
        assert!(matches!(err, ChoiError::NonInvertibleMap { .. }));
    }

    #[test]
    fn short_series_is_rejected() {
        let series = vec![ChoiMatrix::phi_plus(); 2];
        assert!(recover_canonical_rates(&series, &[0.0, 1.0]).is_err());
    }

    #[test]
    fn transfer_of_identity_channel_is_identity() {
        let t = transfer_matrix(&ChoiMatrix::phi_plus());
        assert!((t - Op4::identity()).iter().all(|z| z.norm() < 1e-15));
    }
}
