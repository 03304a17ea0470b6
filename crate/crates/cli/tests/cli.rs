use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn markovnet(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_markovnet")).args(args).current_dir(dir).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

const SMALL: &[&str] = &["--train", "60", "--validation", "15", "--test", "30"];

fn generate(dir: &Path, name: &str, extra: &[&str]) {
    let mut args = vec!["generate", "--family", "pauli", "--seed", "7", "--out", name];
    args.extend_from_slice(SMALL);
    args.extend_from_slice(extra);
    let o = markovnet(&args, dir);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn generate_writes_all_records() {
    let dir = tempfile::tempdir().unwrap();
    generate(dir.path(), "ds.mnd", &[]);
    let text = fs::read_to_string(dir.path().join("ds.mnd")).unwrap();
    let records = text.lines().filter(|l| l.starts_with(|c: char| c.is_ascii_digit())).count();
    assert_eq!(records, 105);
}

#[test]
fn usage_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&markovnet(&["generate", "--family", "pauli"], dir.path())), 2);
    let o = markovnet(&["generate", "--fidelity", "0.95", "--mode", "full", "--out", "x.mnd"], dir.path());
    assert_eq!(code(&o), 2);
    assert!(!dir.path().join("x.mnd").exists());
    assert_eq!(code(&markovnet(&["generate", "--bogus"], dir.path())), 2);
    assert_eq!(code(&markovnet(&["train", "--dataset", "missing.mnd", "--out", "m.mnm"], dir.path())), 2);
}

#[test]
fn config_file_keys_and_precedence() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("bad.cfg"), "family = pauli\ncolour = blue\n").unwrap();
    let o = markovnet(&["--config", "bad.cfg", "generate", "--out", "a.mnd"], dir.path());
    assert_eq!(code(&o), 2);

    fs::write(dir.path().join("gen.cfg"), "family = gad\ntrain = 30\nvalidation = 3\ntest = 3\n").unwrap();
    let o = markovnet(&["--config", "gen.cfg", "generate", "--train", "6", "--out", "b.mnd"], dir.path());
    assert_eq!(code(&o), 0);
    let summary = stdout(&o);
    assert!(summary.contains("train 6 validation 3 test 3"), "{summary}");
    assert!(summary.contains("gad"));
}

#[test]
fn train_eval_and_reproducibility() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    generate(d, "ds.mnd", &[]);
    let train = ["train", "--dataset", "ds.mnd", "--epochs", "3", "--batch-size", "20", "--seed", "1"];
    for out in ["m1.mnm", "m2.mnm"] {
        let mut args = train.to_vec();
        args.extend(["--out", out]);
        let o = markovnet(&args, d);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    }
    let j1 = fs::read(d.join("m1.mnm.metrics.json")).unwrap();
    assert_eq!(j1, fs::read(d.join("m2.mnm.metrics.json")).unwrap());
    assert_eq!(fs::read(d.join("m1.mnm")).unwrap(), fs::read(d.join("m2.mnm")).unwrap());
    let csv = fs::read_to_string(d.join("m1.mnm.loss.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("epoch,loss,accuracy"));
    assert_eq!(csv.lines().count(), 4);

    let o = markovnet(&["eval", "--dataset", "ds.mnd", "--model", "m1.mnm"], d);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let total: u64 = v["confusion"].as_array().unwrap()[0]
        .as_array()
        .unwrap()
        .iter()
        .chain(v["confusion"][1].as_array().unwrap())
        .chain(v["confusion"][2].as_array().unwrap())
        .map(|x| x.as_u64().unwrap())
        .sum();
    assert_eq!(total, 30);

    generate(d, "full.mnd", &["--mode", "full"]);
    let o = markovnet(&["eval", "--dataset", "full.mnd", "--model", "m1.mnm"], d);
    assert_eq!(code(&o), 3);
}

#[test]
fn audit_passes_on_generated_data() {
    let dir = tempfile::tempdir().unwrap();
    generate(dir.path(), "ds.mnd.gz", &[]);
    let o = markovnet(&["audit", "--dataset", "ds.mnd.gz", "--out", "audit.json"], dir.path());
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let v: serde_json::Value = serde_json::from_slice(&fs::read(dir.path().join("audit.json")).unwrap()).unwrap();
    assert_eq!(v["sign_rule_agreement"].as_f64(), Some(1.0));
    assert!(v["recovered_agreement"].as_f64().unwrap() >= 0.99);
}

#[test]
fn corrupt_dataset_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("bad.mnd"), "markovnet-dataset v1\nmode=diagonal\n").unwrap();
    let o = markovnet(&["audit", "--dataset", "bad.mnd"], dir.path());
    assert_eq!(code(&o), 3);
}

#[test]
fn recover_rates_csv() {
    let dir = tempfile::tempdir().unwrap();
    let o = markovnet(
        &["recover-rates", "--family", "pauli", "--label", "semigroup", "--seed", "4", "--t-end", "1", "--spacing", "0.01"],
        dir.path(),
    );
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("t,rate0,rate1,rate2"));
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|x| x.parse().unwrap()).collect()).collect();
    // central differences drop both endpoints
    assert_eq!(rows.len(), 99);
    // constant rates are recovered as constants
    for r in &rows {
        for k in 1..4 {
            assert!((r[k] - rows[50][k]).abs() < 1e-6);
        }
    }
}

#[test]
fn sweep_crossgen_and_forecast_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let o = markovnet(&["sweep-length", "--family", "gad", "--lengths", "1,1.5", "--runs", "2", "--epochs", "1", "--out", "sweep.csv"], d);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(d.join("sweep.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("family,t_end,steps,mean,std,run0,run1"));
    assert_eq!(csv.lines().count(), 3);
    assert!(d.join("sweep.csv.json").exists());
    let o = markovnet(&["sweep-length", "--lengths", "0.7", "--out", "s.csv"], d);
    assert_eq!(code(&o), 2);

    let mut args = vec!["crossgen", "--train-family", "pauli", "--test-family", "pauli-rb", "--epochs", "2", "--out", "cg.json"];
    args.extend_from_slice(SMALL);
    let o = markovnet(&args, d);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_slice(&fs::read(d.join("cg.json")).unwrap()).unwrap();
    assert!(v["test_accuracy"].as_f64().is_some());

    let mut args = vec!["forecast", "--epochs", "2", "--out", "f.mnm"];
    args.extend_from_slice(SMALL);
    let o = markovnet(&args, d);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let fc = fs::read_to_string(d.join("f.mnm.forecast.csv")).unwrap();
    assert_eq!(fc.lines().next(), Some("sample,time,component,actual,predicted"));
    assert_eq!(fc.lines().count(), 1 + 30 * 12);
    let v: serde_json::Value = serde_json::from_slice(&fs::read(d.join("f.mnm.metrics.json")).unwrap()).unwrap();
    assert!(v["forecast_mse"].as_f64().unwrap().is_finite());
}
