//! Direct integration of the dissipative master equation on the Choi state.
//!
//! Independent of every closed form in this module: the only inputs are the
//! Lindblad operators and their rates.

use super::{identity2, kron, ChoiError, ChoiMatrix, DecayRateSpec, Op2, Op4, Result};

/// RK4 step used by [`evolve_choi_numerical`].
pub const ORACLE_STEP: f64 = 1e-3;

const DRIFT_TOL: f64 = 1e-8;

/// One term γ(t)·(A·A† − ½{A†A, ·}) of the generator.
pub struct Dissipator<'a> {
    pub op: Op2,
    pub rate: Box<dyn Fn(f64) -> f64 + Send + Sync + 'a>,
}

impl<'a> Dissipator<'a> {
    pub fn new(op: Op2, rate: impl Fn(f64) -> f64 + Send + Sync + 'a) -> Self {
        Self { op, rate: Box::new(rate) }
    }
}

struct Lifted {
    jump: Op4,
    jump_adj: Op4,
    half_norm: Op4,
}

fn generator(terms: &[Lifted], rates: &[f64], c: &Op4) -> Op4 {
    let mut out = Op4::zeros();
    for (l, &g) in terms.iter().zip(rates) {
        if g == 0.0 {
            continue;
        }
        let d = l.jump * c * l.jump_adj - l.half_norm * c - c * l.half_norm;
        out += d.scale(g);
    }
    out
}

/// Trace drift, or the size of a negative eigenvalue. The generator is
/// traceless, so an unstable step shows up as lost positivity first.
fn accuracy_drift(state: &Op4) -> f64 {
    let tr = state.trace();
    let trace_drift = (tr.re - 1.0).abs().max(tr.im.abs());
    if !trace_drift.is_finite() || state.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return f64::INFINITY;
    }
    let min_eig = ChoiMatrix::from_matrix_unchecked(*state).eigenvalues()[0];
    trace_drift.max(-min_eig)
}

/// Integrates dC/dt = (𝓛(t) ⊗ id)[C] from C(0) = |φ⁺⟩⟨φ⁺| with fixed-step RK4,
/// returning C at each grid time. Each grid interval is split into equal
/// substeps no longer than `step`.
pub fn evolve_choi(dissipators: &[Dissipator<'_>], times: &[f64], step: f64) -> Result<Vec<ChoiMatrix>> {
    if times.is_empty() || times[0] != 0.0 {
        return Err(ChoiError::Parameter("time grid must start at 0".into()));
    }
    if times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(ChoiError::Parameter("time grid must be strictly increasing".into()));
    }
    if !(step > 0.0 && step.is_finite()) {
        return Err(ChoiError::Parameter(format!("step {step} must be positive")));
    }
    let id = identity2();
    let lifted: Vec<Lifted> = dissipators
        .iter()
        .map(|d| {
            let jump = kron(&d.op, &id);
            Lifted {
                jump,
                jump_adj: jump.adjoint(),
                half_norm: kron(&(d.op.adjoint() * d.op), &id).scale(0.5),
            }
        })
        .collect();
    let at = |t: f64| -> Vec<f64> { dissipators.iter().map(|d| (d.rate)(t)).collect() };

    let mut state = ChoiMatrix::phi_plus().into_matrix();
    let mut out = Vec::with_capacity(times.len());
    out.push(ChoiMatrix::from_matrix_unchecked(state));
    for w in times.windows(2) {
        let (t0, t1) = (w[0], w[1]);
        let n = ((t1 - t0) / step).ceil().max(1.0) as usize;
        let h = (t1 - t0) / n as f64;
        for i in 0..n {
            let t = t0 + i as f64 * h;
            let g0 = at(t);
            let gm = at(t + h / 2.0);
            let g1 = at(t + h);
            let k1 = generator(&lifted, &g0, &state);
            let k2 = generator(&lifted, &gm, &(state + k1.scale(h / 2.0)));
            let k3 = generator(&lifted, &gm, &(state + k2.scale(h / 2.0)));
            let k4 = generator(&lifted, &g1, &(state + k3.scale(h)));
            state += (k1 + k2.scale(2.0) + k3.scale(2.0) + k4).scale(h / 6.0);
        }
        let drift = accuracy_drift(&state);
        if !(drift <= DRIFT_TOL) {
            return Err(ChoiError::IntegrationAccuracy { time: t1, drift });
        }
        out.push(ChoiMatrix::from_matrix_unchecked(state));
    }
    Ok(out)
}

/// Oracle Choi series for Lindblad operators with decay-rate specs, using
/// [`ORACLE_STEP`].
pub fn evolve_choi_numerical(ops: &[Op2], rates: &[DecayRateSpec], times: &[f64]) -> Result<Vec<ChoiMatrix>> {
    if ops.len() != rates.len() {
        return Err(ChoiError::Parameter(format!(
            "{} Lindblad operators but {} rates",
            ops.len(),
            rates.len()
        )));
    }
    let dissipators: Vec<Dissipator<'_>> = ops
        .iter()
        .zip(rates)
        .map(|(op, spec)| Dissipator::new(*op, move |t| spec.rate(t)))
        .collect();
    evolve_choi(&dissipators, times, ORACLE_STEP)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::choi::{choi_dephasing_rb, choi_pauli, sigma_z, paulis, RateKind};

    fn grid() -> Vec<f64> {
        (0..7).map(|i| i as f64 * 0.5).collect()
    }

    #[test]
    fn empty_generator_keeps_phi_plus() {
        let series = evolve_choi_numerical(&[], &[], &grid()).unwrap();
        assert_eq!(series.len(), 7);
        for c in series {
            assert!(c.max_abs_diff(&ChoiMatrix::phi_plus()) == 0.0);
        }
    }

    #[test]
    fn z_dephasing_matches_closed_form() {
        let spec = DecayRateSpec::constant(0.7).unwrap();
        let op = sigma_z().scale(std::f64::consts::FRAC_1_SQRT_2);
        let series = evolve_choi_numerical(&[op], &[spec], &grid()).unwrap();
        for (c, t) in series.iter().zip(grid()) {
            let exact = choi_dephasing_rb(0.0, 0.0, spec.integral(t));
            assert!(c.max_abs_diff(&exact) < 1e-8, "t = {t}");
        }
    }

    #[test]
    fn sine_pauli_matches_closed_form() {
        let specs = [2.3, 3.1, 3.9].map(|b| DecayRateSpec::new(RateKind::Sine, b).unwrap());
        let ops = paulis().map(|p| p.scale(std::f64::consts::FRAC_1_SQRT_2));
        let series = evolve_choi_numerical(&ops, &specs, &grid()).unwrap();
        for (c, t) in series.iter().zip(grid()) {
            let exact = choi_pauli(specs[0].integral(t), specs[1].integral(t), specs[2].integral(t));
            assert!(c.max_abs_diff(&exact) < 1e-8, "t = {t}");
        }
    }

    #[test]
    fn coarse_steps_trip_the_drift_check() {
        let op = sigma_z().scale(40.0);
        let d = [Dissipator::new(op, |_| 1.0)];
        let err = evolve_choi(&d, &[0.0, 1.0], 0.5).unwrap_err();
        assert!(matches!(err, ChoiError::IntegrationAccuracy { .. }), "{err:?}");
    }

    #[test]
    fn mismatched_inputs_are_rejected() {
        let spec = DecayRateSpec::constant(0.7).unwrap();
        assert!(evolve_choi_numerical(&[], &[spec], &grid()).is_err());
        assert!(evolve_choi_numerical(&[], &[], &[0.5, 1.0]).is_err());
    }
}
