//! Labeled Choi-state time series: channel sampling, features, noise, and
//! the on-disk dataset format.

mod audit;
mod features;
mod io;
mod rng;
mod sample;
mod spec;

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use audit::{audit_labels, recovered_label, sign_rule_label, AuditReport, AUDIT_SPACING};
pub use features::{
    apply_werner_noise, features_series, FeatureMode, TimeGrid, TimeSeriesSample, FULL_OFF_DIAGONALS,
};
pub use io::{load_dataset, save_dataset, FORMAT_HEADER};
pub use rng::{sample_rng, sample_seed, seeded, SampleRng};
pub use sample::sample_channel;
pub use spec::{ChannelKind, ChannelSpec, Family};

use crate::choi::ChoiError;
use crate::ClassLabel;

/// Tolerance on each row's population sum and on the [0, 1] bounds.
pub const ROW_SUM_TOL: f64 = 1e-10;

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("unsupported dataset format version `{0}`")]
    Version(String),
    #[error("sample {index}: {message}")]
    Invalid { index: usize, message: String },
    #[error(transparent)]
    Choi(#[from] ChoiError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, DatasetError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitSizes {
    pub train: usize,
    pub validation: usize,
    pub test: usize,
}

impl SplitSizes {
    pub fn total(&self) -> usize {
        self.train + self.validation + self.test
    }

    /// Position of global sample `index` within its split.
    pub fn local_index(&self, index: usize) -> usize {
        if index < self.train {
            index
        } else if index < self.train + self.validation {
            index - self.train
        } else {
            index - self.train - self.validation
        }
    }
}

impl Default for SplitSizes {
    fn default() -> Self {
        Self { train: 7200, validation: 900, test: 900 }
    }
}

/// Whether per-sample channel specs can be rebuilt from the seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Provenance {
    Generated,
    None,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Provenance::Generated => "generated",
            Provenance::None => "none",
        })
    }
}

impl FromStr for Provenance {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "generated" => Ok(Provenance::Generated),
            "none" => Ok(Provenance::None),
            other => Err(format!("unknown provenance `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DatasetMeta {
    pub mode: FeatureMode,
    pub fidelity: f64,
    pub grid: TimeGrid,
    pub seed: u64,
    pub families: Vec<Family>,
    pub provenance: Provenance,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub meta: DatasetMeta,
    pub train: Vec<TimeSeriesSample>,
    pub validation: Vec<TimeSeriesSample>,
    pub test: Vec<TimeSeriesSample>,
}

impl Dataset {
    pub fn sizes(&self) -> SplitSizes {
        SplitSizes { train: self.train.len(), validation: self.validation.len(), test: self.test.len() }
    }

    /// All samples in file order: train, validation, test.
    pub fn samples(&self) -> impl Iterator<Item = &TimeSeriesSample> {
        self.train.iter().chain(&self.validation).chain(&self.test)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BuildConfig {
    pub families: Vec<Family>,
    pub grid: TimeGrid,
    pub mode: FeatureMode,
    pub fidelity: f64,
    pub sizes: SplitSizes,
    pub master_seed: u64,
}

impl Default for BuildConfig {
    fn default() -> Self {
        Self {
            families: Family::ALL.to_vec(),
            grid: TimeGrid::default(),
            mode: FeatureMode::Diagonal,
            fidelity: 1.0,
            sizes: SplitSizes::default(),
            master_seed: 0,
        }
    }
}

/// Class and family of the `local`-th sample of a split. Classes cycle
/// fastest, so every split is balanced to within one sample per class and,
/// within each class, families cycle in order.
pub fn assignment(local: usize, families: &[Family]) -> (ClassLabel, Family) {
    let label = ClassLabel::from_index(local % 3).expect("index below 3");
    (label, families[(local / 3) % families.len()])
}

/// Sample `index` (global, over train, validation, test) of a dataset.
pub fn generate_sample(config: &BuildConfig, index: usize) -> Result<TimeSeriesSample> {
    let (label, family) = assignment(config.sizes.local_index(index), &config.families);
    let spec = sample_channel(family, label, sample_seed(config.master_seed, index as u64));
    let mut sample = features_series(&spec, &config.grid, config.mode);
    if config.fidelity < 1.0 {
        for mut row in sample.features.rows_mut() {
            let noisy = features::werner([row[0], row[1], row[2], row[3]], config.fidelity);
            for k in 0..4 {
                row[k] = noisy[k];
            }
        }
    }
    Ok(sample)
}

fn validate_config(config: &BuildConfig) -> Result<()> {
    if config.families.is_empty() {
        return Err(DatasetError::Config("family list is empty".into()));
    }
    let s = config.sizes;
    if s.train == 0 || s.validation == 0 || s.test == 0 {
        return Err(DatasetError::Config(format!(
            "split sizes must be positive, got {}/{}/{}",
            s.train, s.validation, s.test
        )));
    }
    if !(0.0..=1.0).contains(&config.fidelity) {
        return Err(DatasetError::Config(format!("fidelity {} must lie in [0, 1]", config.fidelity)));
    }
    if config.mode == FeatureMode::Full && config.fidelity < 1.0 {
        return Err(DatasetError::Config(
            "noise is defined on Bell populations only; use diagonal mode when fidelity < 1".into(),
        ));
    }
    TimeGrid::new(config.grid.t_end, config.grid.steps)?;
    Ok(())
}

/// Generates a dataset. Samples are produced in parallel on the current
/// rayon pool and assembled by index, so the result depends only on
/// `config`.
pub fn build_dataset(config: &BuildConfig) -> Result<Dataset> {
    validate_config(config)?;
    let sizes = config.sizes;
    let mut all = (0..sizes.total())
        .into_par_iter()
        .map(|i| generate_sample(config, i))
        .collect::<Result<Vec<_>>>()?;
    let test = all.split_off(sizes.train + sizes.validation);
    let validation = all.split_off(sizes.train);
    Ok(Dataset {
        meta: DatasetMeta {
            mode: config.mode,
            fidelity: config.fidelity,
            grid: config.grid,
            seed: config.master_seed,
            families: config.families.clone(),
            provenance: Provenance::Generated,
        },
        train: all,
        validation,
        test,
    })
}

/// Checks the population constraints of every row; `index` names the sample
/// in error messages.
pub fn validate_sample(sample: &TimeSeriesSample, index: usize) -> Result<()> {
    for (r, row) in sample.features.rows().into_iter().enumerate() {
        if row.iter().any(|x| !x.is_finite()) {
            return Err(DatasetError::Invalid { index, message: format!("row {r} has a non-finite value") });
        }
        let pops = row.iter().take(4);
        let sum: f64 = pops.clone().sum();
        if (sum - 1.0).abs() > ROW_SUM_TOL {
            return Err(DatasetError::Invalid {
                index,
                message: format!("row {r}: Bell populations sum to {sum}"),
            });
        }
        if let Some(x) = pops.clone().find(|&&x| !(-ROW_SUM_TOL..=1.0 + ROW_SUM_TOL).contains(&x)) {
            return Err(DatasetError::Invalid {
                index,
                message: format!("row {r}: population {x} outside [0, 1]"),
            });
        }
    }
    Ok(())
}
