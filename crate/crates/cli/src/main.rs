//! `markovnet` command-line interface.

mod config;

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use markovnet::dataset::{
    audit_labels, build_dataset, load_dataset, sample_channel, save_dataset, BuildConfig, Dataset, FeatureMode,
    Family, Provenance, SplitSizes, TimeGrid, AUDIT_SPACING,
};
use markovnet::experiments::{
    evaluate, run_generalization, run_length_sweep, train_classifier, train_forecaster,
    write_forecast_csv, write_json, write_loss_csv, write_sweep_csv, DataConfig, ExperimentError, ForecastTask,
    TrainConfig, FORECAST_GRID,
};
use markovnet::nn::{load_model, save_model, CellKind};
use markovnet::{choi, ClassLabel};
use serde::Serialize;

use config::{Settings, UsageError};

const EXIT_FAILURE: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_DATA: u8 = 3;
const EXIT_DIVERGED: u8 = 4;
const EXIT_IO: u8 = 5;
const EXIT_VALIDATION: u8 = 6;

#[derive(Parser)]
#[command(name = "markovnet", version, about = "Classify and forecast single-qubit channel dynamics")]
struct Cli {
    /// Flat key=value file; command-line flags take precedence over it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads for dataset generation and independent runs.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a labeled dataset file.
    Generate(GenerateArgs),
    /// Train a classifier on a dataset file.
    Train(TrainArgs),
    /// Evaluate a trained classifier on a dataset split.
    Eval(EvalArgs),
    /// Train a forecaster and write its predictions.
    Forecast(ForecastArgs),
    /// Accuracy against series length, averaged over seeded runs.
    SweepLength(SweepArgs),
    /// Train on one family and test on another.
    Crossgen(CrossgenArgs),
    /// Check dataset labels against the sign rule and recovered rates.
    Audit(AuditArgs),
    /// Dump the canonical rates recovered from one channel as CSV.
    RecoverRates(RecoverArgs),
}

#[derive(Args, Default)]
struct DataArgs {
    /// Family or comma-separated list, or `all`.
    #[arg(long)]
    family: Option<String>,
    /// `diagonal` or `full`.
    #[arg(long)]
    mode: Option<String>,
    #[arg(long)]
    fidelity: Option<f64>,
    #[arg(long)]
    t_end: Option<f64>,
    #[arg(long)]
    steps: Option<usize>,
    #[arg(long)]
    train: Option<usize>,
    #[arg(long)]
    validation: Option<usize>,
    #[arg(long)]
    test: Option<usize>,
    /// Dataset master seed.
    #[arg(long)]
    data_seed: Option<u64>,
}

#[derive(Args, Default)]
struct TrainingArgs {
    /// `gru` or `lstm`.
    #[arg(long)]
    cell: Option<String>,
    #[arg(long)]
    lr: Option<f64>,
    #[arg(long)]
    epochs: Option<usize>,
    #[arg(long)]
    batch_size: Option<usize>,
    /// Weight-initialization and shuffle seed.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct GenerateArgs {
    #[command(flatten)]
    data: DataArgs,
    /// Alias for --data-seed.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct TrainArgs {
    #[arg(long)]
    dataset: Option<PathBuf>,
    #[command(flatten)]
    training: TrainingArgs,
    /// Model file; metrics go to `<out>.metrics.json` and `<out>.loss.csv`.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    dataset: Option<PathBuf>,
    #[arg(long)]
    model: Option<PathBuf>,
    /// `train`, `validation` or `test`.
    #[arg(long)]
    split: Option<String>,
    /// Metrics JSON; printed to stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ForecastArgs {
    /// Dataset on the 11-point forecasting grid; generated when absent.
    #[arg(long)]
    dataset: Option<PathBuf>,
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    training: TrainingArgs,
    /// Model file; also writes `<out>.metrics.json`, `<out>.loss.csv` and
    /// `<out>.forecast.csv`.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    family: Option<String>,
    /// Comma-separated series lengths T, multiples of 0.5.
    #[arg(long)]
    lengths: Option<String>,
    #[arg(long)]
    runs: Option<usize>,
    #[command(flatten)]
    training: TrainingArgs,
    /// Sweep CSV; the JSON table goes to `<out>.json`.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CrossgenArgs {
    #[arg(long)]
    train_family: Option<String>,
    #[arg(long)]
    test_family: Option<String>,
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    training: TrainingArgs,
    /// Metrics JSON.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct AuditArgs {
    #[arg(long)]
    dataset: Option<PathBuf>,
    /// Report JSON; a summary is always printed.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RecoverArgs {
    #[arg(long)]
    family: Option<String>,
    #[arg(long)]
    label: Option<String>,
    /// Per-sample seed of the channel.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    t_end: Option<f64>,
    #[arg(long)]
    spacing: Option<f64>,
    /// CSV file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

const DATA_KEYS: &[&str] =
    &["family", "mode", "fidelity", "t_end", "steps", "train", "validation", "test", "data_seed"];
const TRAINING_KEYS: &[&str] = &["cell", "lr", "epochs", "batch_size", "seed"];

fn keys(groups: &[&[&'static str]], extra: &[&'static str]) -> Vec<&'static str> {
    groups.iter().flat_map(|g| g.iter().copied()).chain(extra.iter().copied()).collect()
}

fn build_config(a: &DataArgs, s: &Settings, defaults: BuildConfig) -> anyhow::Result<BuildConfig> {
    let families = match s.value("family", a.family.clone())? {
        Some(f) => Family::parse_list(&f).map_err(UsageError)?,
        None => defaults.families,
    };
    let mode: FeatureMode = s.parsed("mode", a.mode.clone(), defaults.mode)?;
    let grid = TimeGrid::new(s.get("t_end", a.t_end, defaults.grid.t_end)?, s.get("steps", a.steps, defaults.grid.steps)?)
        .map_err(|e| UsageError(e.to_string()))?;
    let sizes = SplitSizes {
        train: s.get("train", a.train, defaults.sizes.train)?,
        validation: s.get("validation", a.validation, defaults.sizes.validation)?,
        test: s.get("test", a.test, defaults.sizes.test)?,
    };
    Ok(BuildConfig {
        families,
        grid,
        mode,
        fidelity: s.get("fidelity", a.fidelity, defaults.fidelity)?,
        sizes,
        master_seed: s.get("data_seed", a.data_seed, defaults.master_seed)?,
    })
}

fn train_config(a: &TrainingArgs, s: &Settings, defaults: TrainConfig) -> anyhow::Result<TrainConfig> {
    let cell = match s.value("cell", a.cell.clone())?.as_deref() {
        None => defaults.cell,
        Some("gru") => CellKind::Gru,
        Some("lstm") => CellKind::Lstm,
        Some(other) => return Err(UsageError(format!("unknown cell `{other}`, expected gru or lstm")).into()),
    };
    let cfg = TrainConfig {
        lr: s.get("lr", a.lr, defaults.lr)?,
        epochs: s.get("epochs", a.epochs, defaults.epochs)?,
        batch_size: s.get("batch_size", a.batch_size, defaults.batch_size)?,
        seed: s.get("seed", a.seed, defaults.seed)?,
        cell,
    };
    cfg.validate().map_err(|e| UsageError(e.to_string()))?;
    Ok(cfg)
}

fn require(name: &str, value: Option<PathBuf>) -> anyhow::Result<PathBuf> {
    value.ok_or_else(|| UsageError(format!("--{} is required", name.replace('_', "-"))).into())
}

/// Fails before any work when an output cannot be created.
fn check_output(path: &Path) -> anyhow::Result<()> {
    match path.parent() {
        Some(dir) if !dir.as_os_str().is_empty() && !dir.is_dir() => {
            Err(UsageError(format!("output directory {} does not exist", dir.display())).into())
        }
        _ => Ok(()),
    }
}

fn check_input(path: &Path) -> anyhow::Result<()> {
    if path.is_file() {
        Ok(())
    } else {
        Err(UsageError(format!("input file {} does not exist", path.display())).into())
    }
}

fn with_suffix(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn load(path: &Path) -> anyhow::Result<Dataset> {
    load_dataset(path).with_context(|| format!("reading {}", path.display()))
}

fn print_summary(ds: &Dataset) {
    let mut counts: BTreeMap<(String, &str), usize> = BTreeMap::new();
    for s in ds.samples() {
        *counts.entry((s.family.to_string(), s.label.name())).or_default() += 1;
    }
    let sizes = ds.sizes();
    println!("train {} validation {} test {}", sizes.train, sizes.validation, sizes.test);
    for ((family, label), n) in counts {
        println!("{family:<14} {label:<14} {n}");
    }
}

fn cmd_generate(a: GenerateArgs, s: &Settings) -> anyhow::Result<()> {
    s.check_keys(&keys(&[DATA_KEYS], &["seed", "out"]))?;
    let out = require("out", s.value("out", a.out.map(|p| p.display().to_string()))?.map(PathBuf::from))?;
    check_output(&out)?;
    let mut cfg = build_config(&a.data, s, BuildConfig::default())?;
    if a.data.data_seed.is_none() {
        cfg.master_seed = s.get("seed", a.seed, cfg.master_seed)?;
    }
    let ds = build_dataset(&cfg)?;
    save_dataset(&ds, &out)?;
    print_summary(&ds);
    Ok(())
}

#[derive(Serialize)]
struct ClassifierReport<'a> {
    cell: CellKind,
    lr: f64,
    epochs: usize,
    batch_size: usize,
    seed: u64,
    #[serde(flatten)]
    metrics: &'a markovnet::experiments::Metrics,
}

fn path_setting(s: &Settings, key: &str, flag: Option<PathBuf>) -> anyhow::Result<Option<PathBuf>> {
    Ok(s.value(key, flag.map(|p| p.display().to_string()))?.map(PathBuf::from))
}

fn cmd_train(a: TrainArgs, s: &Settings) -> anyhow::Result<()> {
    s.check_keys(&keys(&[TRAINING_KEYS], &["dataset", "out"]))?;
    let data = require("dataset", path_setting(s, "dataset", a.dataset)?)?;
    let out = require("out", path_setting(s, "out", a.out)?)?;
    check_input(&data)?;
    check_output(&out)?;
    let cfg = train_config(&a.training, s, TrainConfig::default())?;
    let ds = load(&data)?;
    let (model, metrics) = train_classifier(&ds, &cfg)?;
    save_model(&model, &out)?;
    let report = ClassifierReport {
        cell: cfg.cell,
        lr: cfg.lr,
        epochs: cfg.epochs,
        batch_size: cfg.batch_size,
        seed: cfg.seed,
        metrics: &metrics,
    };
    write_json(&with_suffix(&out, ".metrics.json"), &report)?;
    write_loss_csv(&with_suffix(&out, ".loss.csv"), &metrics.loss_history, &metrics.accuracy_history)?;
    println!("train accuracy {:.4} test accuracy {:.4}", metrics.train_accuracy, metrics.test_accuracy);
    Ok(())
}

#[derive(Serialize)]
struct EvalReport {
    split: String,
    accuracy: f64,
    confusion: markovnet::experiments::Confusion,
}

fn cmd_eval(a: EvalArgs, s: &Settings) -> anyhow::Result<()> {
    s.check_keys(&["dataset", "model", "split", "out"])?;
    let data = require("dataset", path_setting(s, "dataset", a.dataset)?)?;
    let model_path = require("model", path_setting(s, "model", a.model)?)?;
    check_input(&data)?;
    check_input(&model_path)?;
    let out = path_setting(s, "out", a.out)?;
    if let Some(o) = &out {
        check_output(o)?;
    }
    let split = s.value("split", a.split)?.unwrap_or_else(|| "test".into());
    let ds = load(&data)?;
    let samples = match split.as_str() {
        "train" => &ds.train,
        "validation" => &ds.validation,
        "test" => &ds.test,
        other => return Err(UsageError(format!("unknown split `{other}`")).into()),
    };
    let model = load_model(&model_path).with_context(|| format!("reading {}", model_path.display()))?;
    let confusion = evaluate(&model, samples)?;
    let report = EvalReport { split, accuracy: confusion.accuracy(), confusion };
    match out {
        Some(o) => {
            write_json(&o, &report)?;
            println!("accuracy {:.4}", report.accuracy);
        }
        None => println!("{}", serde_json::to_string_pretty(&report)?),
    }
    Ok(())
}

#[derive(Serialize)]
struct ForecastReport<'a> {
    task: ForecastTask,
    cell: CellKind,
    lr: f64,
    epochs: usize,
    batch_size: usize,
    seed: u64,
    forecast_mse: f64,
    loss_history: &'a [f64],
}

fn cmd_forecast(a: ForecastArgs, s: &Settings) -> anyhow::Result<()> {
    s.check_keys(&keys(&[DATA_KEYS, TRAINING_KEYS], &["dataset", "out"]))?;
    let out = require("out", path_setting(s, "out", a.out)?)?;
    check_output(&out)?;
    let dataset = path_setting(s, "dataset", a.dataset)?;
    let cfg = train_config(&a.training, s, TrainConfig::default())?;
    let ds = match dataset {
        Some(p) => {
            check_input(&p)?;
            load(&p)?
        }
        None => {
            let defaults = BuildConfig {
                families: vec![Family::DephasingRB, Family::PauliRB],
                grid: FORECAST_GRID,
                ..BuildConfig::default()
            };
            build_dataset(&build_config(&a.data, s, defaults)?)?
        }
    };
    let task = ForecastTask::default();
    let (model, metrics) = train_forecaster(&ds, &task, &cfg)?;
    save_model(&model, &out)?;
    write_json(
        &with_suffix(&out, ".metrics.json"),
        &ForecastReport {
            task,
            cell: cfg.cell,
            lr: cfg.lr,
            epochs: cfg.epochs,
            batch_size: cfg.batch_size,
            seed: cfg.seed,
            forecast_mse: metrics.forecast_mse,
            loss_history: &metrics.loss_history,
        },
    )?;
    write_loss_csv(&with_suffix(&out, ".loss.csv"), &metrics.loss_history, &[])?;
    write_forecast_csv(&with_suffix(&out, ".forecast.csv"), &model, &task, &ds.meta.grid, &ds.test)?;
    println!("test mse {:.3e}", metrics.forecast_mse);
    Ok(())
}

fn parse_lengths(s: &str) -> anyhow::Result<Vec<f64>> {
    s.split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| UsageError(format!("invalid length `{t}`")).into()))
        .collect()
}

fn cmd_sweep(a: SweepArgs, s: &Settings) -> anyhow::Result<()> {
    s.check_keys(&keys(&[TRAINING_KEYS], &["family", "lengths", "runs", "out"]))?;
    let out = require("out", path_setting(s, "out", a.out)?)?;
    check_output(&out)?;
    let families = match s.value("family", a.family)? {
        Some(f) => Family::parse_list(&f).map_err(UsageError)?,
        None => Family::ALL.to_vec(),
    };
    let lengths = parse_lengths(&s.value("lengths", a.lengths)?.unwrap_or_else(|| "1,1.5,2,2.5,3".into()))?;
    let runs = s.get("runs", a.runs, 5)?;
    let cfg = train_config(&a.training, s, TrainConfig::length_sweep())?;
    let rows = run_length_sweep(&families, &lengths, runs, cfg.seed, &cfg).map_err(|e| match e {
        ExperimentError::Config(m) => UsageError(m).into(),
        other => anyhow::Error::from(other),
    })?;
    write_sweep_csv(&out, &rows)?;
    write_json(&with_suffix(&out, ".json"), &rows)?;
    for r in &rows {
        println!("{:<14} T={:<4} mean {:.4} std {:.4}", r.family.to_string(), r.t_end, r.mean, r.std);
    }
    Ok(())
}

fn cmd_crossgen(a: CrossgenArgs, s: &Settings) -> anyhow::Result<()> {
    s.check_keys(&keys(&[DATA_KEYS, TRAINING_KEYS], &["train_family", "test_family", "out"]))?;
    let out = require("out", path_setting(s, "out", a.out)?)?;
    check_output(&out)?;
    let family = |key: &str, flag: Option<String>| -> anyhow::Result<Family> {
        let v = s.value(key, flag)?.ok_or_else(|| UsageError(format!("--{} is required", key.replace('_', "-"))))?;
        Ok(v.parse::<Family>().map_err(UsageError)?)
    };
    let train_family = family("train_family", a.train_family)?;
    let test_family = family("test_family", a.test_family)?;
    let b = build_config(&a.data, s, BuildConfig::default())?;
    let data = DataConfig { sizes: b.sizes, grid: b.grid, mode: b.mode, fidelity: b.fidelity, seed: b.master_seed };
    let cfg = train_config(&a.training, s, TrainConfig::default())?;
    let (_, metrics) = run_generalization(train_family, test_family, &data, &cfg)?;
    write_json(&out, &metrics)?;
    println!("{train_family} -> {test_family}: test accuracy {:.4}", metrics.test_accuracy);
    Ok(())
}

#[derive(Serialize)]
struct AuditSummary<'a> {
    sign_rule_agreement: f64,
    recovered_agreement: f64,
    #[serde(flatten)]
    report: &'a markovnet::dataset::AuditReport,
}

/// Sign-rule agreement must be exact; recovered-rate agreement may miss a
/// sample in a hundred.
const MIN_RECOVERED_AGREEMENT: f64 = 0.99;

fn cmd_audit(a: AuditArgs, s: &Settings) -> anyhow::Result<ExitCode> {
    s.check_keys(&["dataset", "out"])?;
    let data = require("dataset", path_setting(s, "dataset", a.dataset)?)?;
    check_input(&data)?;
    let out = path_setting(s, "out", a.out)?;
    if let Some(o) = &out {
        check_output(o)?;
    }
    let ds = load(&data)?;
    if ds.meta.provenance != Provenance::Generated {
        return Err(UsageError("dataset has no generator provenance; its channels cannot be rebuilt".into()).into());
    }
    let specs: Vec<_> = ds.samples().map(|x| x.spec.clone().expect("generated datasets carry specs")).collect();
    let report = audit_labels(&specs, ds.meta.grid.t_end);
    let summary = AuditSummary {
        sign_rule_agreement: report.sign_rule_rate(),
        recovered_agreement: report.recovered_rate(),
        report: &report,
    };
    if let Some(o) = &out {
        write_json(o, &summary)?;
    }
    println!(
        "samples {} sign-rule agreement {:.4} recovered-rate agreement {:.4} recovery errors {}",
        report.total, summary.sign_rule_agreement, summary.recovered_agreement, report.recovery_errors
    );
    if report.sign_rule_agree < report.total || summary.recovered_agreement < MIN_RECOVERED_AGREEMENT {
        eprintln!("label audit failed");
        return Ok(ExitCode::from(EXIT_VALIDATION));
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_recover(a: RecoverArgs, s: &Settings) -> anyhow::Result<()> {
    s.check_keys(&["family", "label", "seed", "t_end", "spacing", "out"])?;
    let family: Family = s
        .value("family", a.family)?
        .ok_or_else(|| UsageError("--family is required".into()))?
        .parse()
        .map_err(UsageError)?;
    let label: ClassLabel = s.parsed("label", a.label, ClassLabel::Markovian)?;
    let seed = s.get("seed", a.seed, 0)?;
    let t_end: f64 = s.get("t_end", a.t_end, TimeGrid::default().t_end)?;
    let spacing: f64 = s.get("spacing", a.spacing, AUDIT_SPACING)?;
    if !(t_end > 0.0 && spacing > 0.0 && spacing < t_end) {
        return Err(UsageError(format!("need 0 < spacing < t_end, got spacing {spacing} and t_end {t_end}")).into());
    }
    let out = path_setting(s, "out", a.out)?;
    if let Some(o) = &out {
        check_output(o)?;
    }
    let spec = sample_channel(family, label, seed);
    let n = (t_end / spacing).round() as usize;
    let times: Vec<f64> = (0..=n).map(|i| t_end * i as f64 / n as f64).collect();
    let rates = choi::recover_canonical_rates(&spec.choi_series(&times), &times)?;
    let mut w: Box<dyn Write> = match &out {
        Some(o) => Box::new(BufWriter::new(File::create(o)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    };
    writeln!(w, "t,rate0,rate1,rate2")?;
    for (t, r) in rates.times.iter().zip(&rates.rates) {
        writeln!(w, "{t},{:e},{:e},{:e}", r[0], r[1], r[2])?;
    }
    w.flush()?;
    Ok(())
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    let settings = match &cli.config {
        Some(p) => Settings::load(p)?,
        None => Settings::default(),
    };
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            return Err(UsageError("--jobs must be positive".into()).into());
        }
        rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global()?;
    }
    match cli.command {
        Command::Generate(a) => cmd_generate(a, &settings)?,
        Command::Train(a) => cmd_train(a, &settings)?,
        Command::Eval(a) => cmd_eval(a, &settings)?,
        Command::Forecast(a) => cmd_forecast(a, &settings)?,
        Command::SweepLength(a) => cmd_sweep(a, &settings)?,
        Command::Crossgen(a) => cmd_crossgen(a, &settings)?,
        Command::Audit(a) => return cmd_audit(a, &settings),
        Command::RecoverRates(a) => cmd_recover(a, &settings)?,
    }
    Ok(ExitCode::SUCCESS)
}

fn exit_code(err: &anyhow::Error) -> u8 {
    use markovnet::dataset::DatasetError;
    use markovnet::nn::NnError;
    for cause in err.chain() {
        if cause.is::<UsageError>() {
            return EXIT_USAGE;
        }
        if let Some(e) = cause.downcast_ref::<ExperimentError>() {
            return match e {
                ExperimentError::Diverged { .. } => EXIT_DIVERGED,
                ExperimentError::Config(_) => EXIT_USAGE,
                ExperimentError::Io(_) => EXIT_IO,
                ExperimentError::Dataset(_) | ExperimentError::Nn(_) => EXIT_DATA,
            };
        }
        if let Some(e) = cause.downcast_ref::<DatasetError>() {
            return match e {
                DatasetError::Config(_) => EXIT_USAGE,
                DatasetError::Io(_) => EXIT_IO,
                _ => EXIT_DATA,
            };
        }
        if let Some(e) = cause.downcast_ref::<NnError>() {
            return if matches!(e, NnError::Io(_)) { EXIT_IO } else { EXIT_DATA };
        }
        if cause.is::<io::Error>() {
            return EXIT_IO;
        }
    }
    EXIT_FAILURE
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
