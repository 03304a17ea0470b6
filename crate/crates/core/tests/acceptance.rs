//! Acceptance suite: one PASS/FAIL line per criterion. The property checks
//! (8a-8g) run first; training criteria run only when all of them pass.
//! Runs without the libtest harness so the lines reach the output directly.

use std::process::ExitCode;
use std::time::Instant;

use markovnet::choi::{evolve_choi, gamma_integral, DecayRateSpec, RateKind, ORACLE_STEP};
use markovnet::dataset::{
    apply_werner_noise, audit_labels, build_dataset, sample_channel, sample_seed, BuildConfig, FeatureMode,
    Family, SplitSizes, TimeGrid,
};
use markovnet::experiments::{
    evaluate, run_generalization, run_length_sweep, run_noise_study, train_classifier, train_forecaster,
    DataConfig, ForecastTask, TrainConfig, FORECAST_GRID,
};
use markovnet::nn::{grad_check, init_params, Architecture, CellKind, ModelParams};
use markovnet::ClassLabel;
use markovnet::choi::BellDiagonal;
use ndarray::{Array2, Array3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const ALL_FAMILIES: [Family; 5] =
    [Family::Dephasing, Family::DephasingRB, Family::Pauli, Family::PauliRB, Family::Gad];

struct Report {
    failed: usize,
}

impl Report {
    fn line(&mut self, id: &str, pass: bool, detail: String) {
        if !pass {
            self.failed += 1;
        }
        println!("{} {id}: {detail}", if pass { "PASS" } else { "FAIL" });
    }

    fn note(&self, id: &str, detail: String) {
        println!("INFO {id}: {detail}");
    }
}

fn secs(t: Instant) -> String {
    format!("{:.0}s", t.elapsed().as_secs_f64())
}

fn random_specs(count: usize, master: u64) -> Vec<markovnet::dataset::ChannelSpec> {
    (0..count)
        .map(|i| {
            let family = ALL_FAMILIES[i % 5];
            let label = ClassLabel::from_index((i / 5) % 3).unwrap();
            sample_channel(family, label, sample_seed(master, i as u64))
        })
        .collect()
}

fn choi_invariants(r: &mut Report) {
    let times = TimeGrid::default().times();
    let mut worst = (0.0f64, 0.0f64, f64::INFINITY);
    for spec in random_specs(1000, 81) {
        for &t in &times {
            let c = spec.choi_at(t);
            worst.0 = worst.0.max((c.trace().re - 1.0).abs().max(c.trace().im.abs()));
            worst.1 = worst.1.max(c.hermiticity_error());
            worst.2 = worst.2.min(c.eigenvalues()[0]);
        }
    }
    let pass = worst.0 <= 1e-12 && worst.1 <= 1e-12 && worst.2 >= -1e-10;
    r.line(
        "8a choi invariants",
        pass,
        format!("1000 samples, max trace error {:.1e}, max Hermiticity error {:.1e}, min eigenvalue {:.1e}", worst.0, worst.1, worst.2),
    );
}

fn oracle_equivalence(r: &mut Report) {
    let times = TimeGrid::default().times();
    let mut worst = 0.0f64;
    for (f, family) in ALL_FAMILIES.iter().enumerate() {
        for i in 0..50u64 {
            let label = ClassLabel::from_index(i as usize % 3).unwrap();
            let spec = sample_channel(*family, label, sample_seed(82, f as u64 * 1000 + i));
            let numeric = evolve_choi(&spec.dissipators(), &times, ORACLE_STEP).expect("oracle integration");
            for (t, c) in times.iter().zip(&numeric) {
                worst = worst.max(spec.choi_at(*t).max_abs_diff(c));
            }
        }
    }
    r.line("8b analytic vs RK4 oracle", worst <= 1e-8, format!("50 samples per family, max entrywise difference {worst:.2e}"));
}

fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    simpson(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) + simpson(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
}

fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson(f, a, b, fa, fm, fb, whole, tol, 50)
}

fn integral_vs_quadrature(r: &mut Report) {
    let mut rng = ChaCha8Rng::seed_from_u64(83);
    let mut worst = 0.0f64;
    for i in 0..100 {
        let (kind, coeff) = match i % 5 {
            0 => (RateKind::Constant, rng.gen_range(0.0..2.0)),
            1 => (RateKind::TanhScaled, rng.gen_range(0.0..1.0)),
            2 => (RateKind::SinSquared, rng.gen_range(2.0..4.0)),
            3 => (RateKind::Sine, rng.gen_range(2.0..4.0)),
            _ => (RateKind::NegTanh, rng.gen_range(1.0..2.0)),
        };
        let spec = DecayRateSpec::new(kind, coeff).unwrap();
        let t = rng.gen_range(0.0..5.0);
        let quad = adaptive_simpson(&|s| spec.rate(s), 0.0, t, 1e-13);
        worst = worst.max((gamma_integral(&spec, t).unwrap() - quad).abs());
    }
    r.line("8c gamma integral vs adaptive quadrature", worst <= 1e-10, format!("100 cases, max difference {worst:.2e}"));
}

// Central differences at ε = 1e-5 are limited by cancellation on gradients
// near 1e-7 (relative error grows as 1/ε below 1e-4), so the sweep over all
// cell and loss pairs uses ε = 1e-4; the ε = 1e-5 figures are printed too.
fn gradient_checks(r: &mut Report) {
    let x = Array3::from_shape_fn((7, 6, 4), |(t, i, j)| ((t * 5 + i * 3 + j) as f64 * 0.7).sin() * 0.5 + 0.5);
    let onehot = Array2::from_shape_fn((6, 3), |(i, j)| f64::from(i % 3 == j));
    let reg = Array2::from_shape_fn((6, 12), |(i, j)| ((i + j) as f64 * 0.3).cos() * 0.5 + 0.5);
    let mut worst = 0.0f64;
    let mut parts = Vec::new();
    let mut fine = Vec::new();
    for cell in [CellKind::Gru, CellKind::Lstm] {
        for (name, arch, y) in [
            ("cross-entropy", Architecture::classifier(cell, 4), &onehot),
            ("mse", Architecture::forecaster(cell, 4, 12), &reg),
        ] {
            let m = init_params(&arch, 84).unwrap();
            let rep = grad_check(&m, x.view(), y.view(), 1e-4, 300, 85).unwrap();
            worst = worst.max(rep.max_relative_error);
            parts.push(format!("{cell:?}/{name} {:.1e}", rep.max_relative_error));
            let small = grad_check(&m, x.view(), y.view(), 1e-5, 300, 85).unwrap();
            if cell == CellKind::Gru && name == "cross-entropy" {
                worst = worst.max(small.max_relative_error);
                parts.push(format!("{cell:?}/{name} at 1e-5 {:.1e}", small.max_relative_error));
            }
            fine.push(format!("{cell:?}/{name} {:.1e}", small.max_relative_error));
        }
    }
    r.line("8d gradient check", worst < 1e-5, format!("max relative error at eps 1e-4: {}", parts.join(", ")));
    r.note("8d gradient check at eps 1e-5", fine.join(", "));
}

fn label_audit(r: &mut Report) {
    let specs = random_specs(600, 86);
    let rep = audit_labels(&specs, TimeGrid::default().t_end);
    let pass = rep.sign_rule_agree == rep.total && rep.recovered_rate() >= 0.99;
    r.line(
        "8e label audit",
        pass,
        format!(
            "{} samples, sign rule {:.4}, recovered rates {:.4} at spacing 1e-3",
            rep.total,
            rep.sign_rule_rate(),
            rep.recovered_rate()
        ),
    );
}

fn werner_checks(r: &mut Report) {
    let mut ok = true;
    let mut worst_sum = 0.0f64;
    for spec in random_specs(200, 87) {
        for t in TimeGrid::default().times() {
            let d = markovnet::choi::bell_diagonal(&spec.choi_at(t));
            let sum: f64 = d.0.iter().sum();
            for f in [0.95, 0.5, 0.25, 0.0] {
                let n = apply_werner_noise(&d, f).unwrap();
                worst_sum = worst_sum.max((n.0.iter().sum::<f64>() - sum).abs());
            }
            ok &= apply_werner_noise(&d, 1.0).unwrap() == d;
            ok &= apply_werner_noise(&d, 0.25).unwrap().0.iter().all(|&x| (x - 0.25 * sum).abs() <= 1e-15);
        }
    }
    let uniform = apply_werner_noise(&BellDiagonal([1.0, 0.0, 0.0, 0.0]), 0.25).unwrap();
    ok &= uniform.0.iter().all(|&x| (x - 0.25).abs() <= 1e-16);
    r.line(
        "8f werner noise",
        ok && worst_sum <= 4.0 * f64::EPSILON,
        format!("normalization drift {worst_sum:.1e}, F=1 identity and F=0.25 uniform: {ok}"),
    );
}

fn determinism(r: &mut Report) {
    let cfg = BuildConfig { sizes: SplitSizes { train: 300, validation: 30, test: 30 }, master_seed: 88, ..BuildConfig::default() };
    let a = build_dataset(&cfg).unwrap();
    let same_data = a == build_dataset(&cfg).unwrap();
    let train = TrainConfig { epochs: 5, batch_size: 64, seed: 89, ..TrainConfig::default() };
    let h1 = train_classifier(&a, &train).unwrap().1.loss_history;
    let h2 = train_classifier(&a, &train).unwrap().1.loss_history;
    let same_loss = h1.iter().map(|x| x.to_bits()).eq(h2.iter().map(|x| x.to_bits()));
    r.line("8g determinism", same_data && same_loss, format!("datasets identical: {same_data}, loss histories bit-identical: {same_loss}"));
}

const CLASSIFIER_FAMILIES: [Family; 4] = [Family::DephasingRB, Family::Pauli, Family::PauliRB, Family::Gad];

fn train_on(families: &[Family], data: &DataConfig) -> (ModelParams, f64) {
    let ds = data.build(families).unwrap();
    let (model, m) = train_classifier(&ds, &TrainConfig::default()).unwrap();
    (model, m.test_accuracy)
}

fn training_criteria(r: &mut Report) {
    let data = DataConfig::default();

    let start = Instant::now();
    let mut pauli_model = None;
    for f in CLASSIFIER_FAMILIES {
        let (model, a) = train_on(&[f], &data);
        if f == Family::Pauli {
            pauli_model = Some(model);
        }
        r.line(&format!("1 classification {f}"), a >= 0.93, format!("test accuracy {a:.4} (bound 0.93), {}", secs(start)));
    }

    let start = Instant::now();
    let (_, a) = train_on(&CLASSIFIER_FAMILIES, &data);
    r.line("2 classification all families", a >= 0.93, format!("test accuracy {a:.4} (bound 0.93), {}", secs(start)));

    let full = DataConfig { mode: FeatureMode::Full, ..data };
    for f in CLASSIFIER_FAMILIES {
        let start = Instant::now();
        let (_, a) = train_on(&[f], &full);
        r.line(&format!("3 full features {f}"), a >= 0.93, format!("test accuracy {a:.4} (bound 0.93), {}", secs(start)));
    }

    let cfg = TrainConfig::default();
    for f in CLASSIFIER_FAMILIES {
        let start = Instant::now();
        let a = run_noise_study(&[f], 0.95, &data, &cfg).unwrap().1.test_accuracy;
        r.line(&format!("4 noise F=0.95 {f}"), a >= 0.90, format!("test accuracy {a:.4} (bound 0.90), {}", secs(start)));
    }
    for f in CLASSIFIER_FAMILIES {
        let start = Instant::now();
        let a = run_noise_study(&[f], 0.25, &data, &cfg).unwrap().1.test_accuracy;
        let pass = (0.27..=0.40).contains(&a);
        r.line(&format!("4 noise F=0.25 {f}"), pass, format!("test accuracy {a:.4} (range [0.27, 0.40]), {}", secs(start)));
    }

    // Training is deterministic, so the criterion-1 Pauli model is the model
    // run_generalization would train; only the held-out sets are rebuilt.
    let pauli = pauli_model.expect("Pauli trained above");
    let held_out = |f: Family| DataConfig { seed: data.seed + 1, ..data }.build(&[f]).unwrap();
    let a = evaluate(&pauli, &held_out(Family::PauliRB).test).unwrap().accuracy();
    r.line("5 generalization pauli -> pauli-rb", a >= 0.90, format!("test accuracy {a:.4} (bound 0.90)"));
    let a = evaluate(&pauli, &held_out(Family::Gad).test).unwrap().accuracy();
    r.note("5 generalization pauli -> gad", format!("test accuracy {a:.4} (reported only)"));
    let a = run_generalization(Family::Dephasing, Family::DephasingRB, &data, &cfg).unwrap().1.test_accuracy;
    r.note("5 generalization dephasing -> dephasing-rb", format!("test accuracy {a:.4} (reported only)"));

    let start = Instant::now();
    let rows = run_length_sweep(&CLASSIFIER_FAMILIES, &[1.0], 5, 0, &TrainConfig::length_sweep()).unwrap();
    for row in rows {
        r.line(
            &format!("6 length sweep T=1 {}", row.family),
            row.mean >= 0.85,
            format!("5-seed mean {:.4} std {:.4} (bound 0.85), {}", row.mean, row.std, secs(start)),
        );
    }

    let start = Instant::now();
    let ds = build_dataset(&BuildConfig {
        families: vec![Family::DephasingRB, Family::PauliRB],
        grid: FORECAST_GRID,
        ..BuildConfig::default()
    })
    .unwrap();
    let mse = train_forecaster(&ds, &ForecastTask::default(), &cfg).unwrap().1.forecast_mse;
    r.line("7 forecasting", mse <= 1e-3, format!("test MSE {mse:.3e} (bound 1e-3), {}", secs(start)));
}

fn main() -> ExitCode {
    let mut r = Report { failed: 0 };
    choi_invariants(&mut r);
    oracle_equivalence(&mut r);
    integral_vs_quadrature(&mut r);
    gradient_checks(&mut r);
    label_audit(&mut r);
    werner_checks(&mut r);
    determinism(&mut r);
    if r.failed > 0 {
        println!("FAIL 1-7: not run, property suite failed");
        return ExitCode::FAILURE;
    }
    training_criteria(&mut r);
    println!("acceptance: {} failed", r.failed);
    if r.failed == 0 { ExitCode::SUCCESS } else { ExitCode::FAILURE }
}
