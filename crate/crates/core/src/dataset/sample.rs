use std::f64::consts::{PI, TAU};

use rand::Rng;

use super::rng::{seeded, SampleRng};
use super::spec::{ChannelKind, ChannelSpec, Family};
use crate::choi::{BlochAxis, DecayRateSpec, EulerAngles, GadSchedule, RateKind};
use crate::ClassLabel;

fn uniform(rng: &mut SampleRng, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * rng.gen::<f64>()
}

// Coefficients below are drawn inside each kind's admissible range, so the
// constructors cannot fail.
fn spec(kind: RateKind, coeff: f64) -> DecayRateSpec {
    DecayRateSpec::new(kind, coeff).expect("sampled coefficient lies in range")
}

fn constant(rng: &mut SampleRng) -> DecayRateSpec {
    spec(RateKind::Constant, uniform(rng, 0.0, 1.0))
}

/// a·tanh t or sin²(bt), each with probability ½.
fn markovian(rng: &mut SampleRng) -> DecayRateSpec {
    if rng.gen_bool(0.5) {
        spec(RateKind::TanhScaled, uniform(rng, 0.0, 1.0))
    } else {
        spec(RateKind::SinSquared, uniform(rng, 2.0, 4.0))
    }
}

fn sine(rng: &mut SampleRng) -> DecayRateSpec {
    spec(RateKind::Sine, uniform(rng, 2.0, 4.0))
}

fn single_rate(label: ClassLabel, rng: &mut SampleRng) -> DecayRateSpec {
    match label {
        ClassLabel::Semigroup => constant(rng),
        ClassLabel::Markovian => markovian(rng),
        ClassLabel::NonMarkovian => sine(rng),
    }
}

fn pauli_rates(label: ClassLabel, rng: &mut SampleRng) -> [DecayRateSpec; 3] {
    match label {
        ClassLabel::Semigroup => [constant(rng), constant(rng), constant(rng)],
        ClassLabel::Markovian => [markovian(rng), markovian(rng), markovian(rng)],
        ClassLabel::NonMarkovian => {
            if rng.gen_bool(0.5) {
                [sine(rng), sine(rng), sine(rng)]
            } else {
                // eternal non-Markovianity: γᵢ = γⱼ = a, γₖ = −a·tanh t
                let a = uniform(rng, 1.0, 2.0);
                let k = rng.gen_range(0..3);
                let mut rates = [spec(RateKind::Constant, a); 3];
                rates[k] = spec(RateKind::NegTanh, a);
                rates
            }
        }
    }
}

fn gad_schedule(label: ClassLabel, rng: &mut SampleRng) -> GadSchedule {
    let coeffs = match label {
        ClassLabel::Semigroup => [uniform(rng, 0.0, 1.0), uniform(rng, 0.0, 1.0)],
        ClassLabel::Markovian => [uniform(rng, 0.0, 1.0), uniform(rng, 0.5, 1.0)],
        ClassLabel::NonMarkovian => [uniform(rng, 0.0, 1.0), uniform(rng, 2.0, 4.0)],
    };
    GadSchedule::new(label, &coeffs).expect("sampled GAD coefficients lie in range")
}

fn euler(rng: &mut SampleRng) -> EulerAngles {
    EulerAngles::new(uniform(rng, 0.0, TAU), uniform(rng, 0.0, PI), uniform(rng, 0.0, TAU))
}

/// Draws a channel of the given family and class from the stream seeded by
/// `seed`. Every family/class combination is supported.
pub fn sample_channel(family: Family, label: ClassLabel, seed: u64) -> ChannelSpec {
    let mut rng = seeded(seed);
    let rng = &mut rng;
    let kind = match family {
        Family::Dephasing => ChannelKind::Dephasing {
            axis: BlochAxis::new(0.0, 0.0),
            rate: single_rate(label, rng),
        },
        Family::DephasingRB => {
            let theta = uniform(rng, -1.0, 1.0).acos();
            let varphi = uniform(rng, 0.0, TAU);
            ChannelKind::Dephasing { axis: BlochAxis::new(theta, varphi), rate: single_rate(label, rng) }
        }
        Family::Pauli => ChannelKind::Pauli { rates: pauli_rates(label, rng), rotation: None },
        Family::PauliRB => {
            let rates = pauli_rates(label, rng);
            ChannelKind::Pauli { rates, rotation: Some(euler(rng)) }
        }
        Family::Gad => ChannelKind::Gad(gad_schedule(label, rng)),
    };
    ChannelSpec { family, label, kind, seed }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_channel() {
        for f in [Family::Dephasing, Family::DephasingRB, Family::Pauli, Family::PauliRB, Family::Gad] {
            for l in ClassLabel::ALL {
                assert_eq!(sample_channel(f, l, 99), sample_channel(f, l, 99));
            }
        }
    }

    #[test]
    fn dephasing_semigroup_rate_is_constant_below_one() {
        let s = sample_channel(Family::DephasingRB, ClassLabel::Semigroup, 42);
        let ChannelKind::Dephasing { rate, .. } = s.kind else { panic!("{s:?}") };
        assert_eq!(rate.kind(), RateKind::Constant);
        assert!((0.0..1.0).contains(&rate.coeff()));
    }

    #[test]
    fn both_non_markovian_pauli_scenarios_occur() {
        let (mut eternal, mut sines) = (0, 0);
        for seed in 0..200 {
            let s = sample_channel(Family::Pauli, ClassLabel::NonMarkovian, seed);
            let ChannelKind::Pauli { rates, .. } = s.kind else { unreachable!() };
            match rates.iter().filter(|r| r.kind() == RateKind::NegTanh).count() {
                1 => {
                    eternal += 1;
                    assert_eq!(rates.iter().filter(|r| r.kind() == RateKind::Constant).count(), 2);
                    assert!(rates.iter().all(|r| (1.0..2.0).contains(&r.coeff())));
                    assert!(rates.iter().all(|r| r.coeff() == rates[0].coeff()));
                }
                0 => {
                    sines += 1;
                    assert!(rates.iter().all(|r| r.kind() == RateKind::Sine));
                }
                _ => panic!("{rates:?}"),
            }
        }
        assert!(eternal > 60 && sines > 60, "{eternal} / {sines}");
    }

    #[test]
    fn rotated_pauli_carries_angles() {
        let s = sample_channel(Family::PauliRB, ClassLabel::Markovian, 5);
        let ChannelKind::Pauli { rotation: Some(r), .. } = s.kind else { panic!() };
        assert!((0.0..TAU).contains(&r.alpha) && (0.0..=PI).contains(&r.beta));
    }
}
