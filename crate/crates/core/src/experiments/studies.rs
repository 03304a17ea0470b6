use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::train::{evaluate, train_classifier};
use super::{ExperimentError, Metrics, Result, TrainConfig};
use crate::dataset::{build_dataset, BuildConfig, Dataset, FeatureMode, Family, SplitSizes, TimeGrid};
use crate::nn::ModelParams;

/// Training-split size of each length-sweep run.
pub const SWEEP_TRAIN_SIZE: usize = 6000;
/// Validation and test sizes of each length-sweep run, keeping the 8:1:1
/// proportions of the default splits.
const SWEEP_HELD_OUT: usize = 750;
const SWEEP_SPACING: f64 = 0.5;

/// Everything about a dataset except its family list.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DataConfig {
    pub sizes: SplitSizes,
    pub grid: TimeGrid,
    pub mode: FeatureMode,
    pub fidelity: f64,
    pub seed: u64,
}

impl Default for DataConfig {
    fn default() -> Self {
        let b = BuildConfig::default();
        Self { sizes: b.sizes, grid: b.grid, mode: b.mode, fidelity: b.fidelity, seed: b.master_seed }
    }
}

impl DataConfig {
    pub fn build_config(&self, families: &[Family]) -> BuildConfig {
        BuildConfig {
            families: families.to_vec(),
            grid: self.grid,
            mode: self.mode,
            fidelity: self.fidelity,
            sizes: self.sizes,
            master_seed: self.seed,
        }
    }

    pub fn build(&self, families: &[Family]) -> Result<Dataset> {
        Ok(build_dataset(&self.build_config(families))?)
    }
}

/// Trains and evaluates on a dataset whose Bell populations are mixed with
/// white noise at fidelity `fidelity`.
pub fn run_noise_study(
    families: &[Family],
    fidelity: f64,
    data: &DataConfig,
    cfg: &TrainConfig,
) -> Result<(ModelParams, Metrics)> {
    if data.mode != FeatureMode::Diagonal {
        return Err(ExperimentError::Config("the noise study uses diagonal features".into()));
    }
    let ds = DataConfig { fidelity, ..*data }.build(families)?;
    train_classifier(&ds, cfg)
}

/// Trains on `train_family` and evaluates on the test split of
/// `test_family`. The test dataset uses the next master seed so that no
/// sample shares its random draws with a training sample.
pub fn run_generalization(
    train_family: Family,
    test_family: Family,
    data: &DataConfig,
    cfg: &TrainConfig,
) -> Result<(ModelParams, Metrics)> {
    let ds = data.build(&[train_family])?;
    let (model, mut metrics) = train_classifier(&ds, cfg)?;
    let test = DataConfig { seed: data.seed.wrapping_add(1), ..*data }.build(&[test_family])?;
    metrics.confusion = evaluate(&model, &test.test)?;
    metrics.test_accuracy = metrics.confusion.accuracy();
    Ok((model, metrics))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub family: Family,
    pub t_end: f64,
    pub steps: usize,
    /// Test accuracy of each run, in seed order.
    pub accuracies: Vec<f64>,
    pub mean: f64,
    /// Population standard deviation over the runs.
    pub std: f64,
}

fn sweep_grid(t_end: f64) -> Result<TimeGrid> {
    let intervals = t_end / SWEEP_SPACING;
    if t_end < 1.0 || (intervals - intervals.round()).abs() > 1e-9 {
        return Err(ExperimentError::Config(format!("sweep length {t_end} must be a multiple of 0.5 and at least 1")));
    }
    let steps = intervals.round() as usize + 1;
    Ok(TimeGrid::new(t_end, steps)?)
}

/// One row per (family, T). Run k of every point uses seed `base_seed + k`
/// for both the dataset and the network; runs execute on the rayon pool.
pub fn run_length_sweep(
    families: &[Family],
    t_values: &[f64],
    runs: usize,
    base_seed: u64,
    cfg: &TrainConfig,
) -> Result<Vec<SweepRow>> {
    if runs == 0 {
        return Err(ExperimentError::Config("at least one run per sweep point".into()));
    }
    let grids = t_values.iter().map(|&t| sweep_grid(t)).collect::<Result<Vec<_>>>()?;
    let points: Vec<(Family, TimeGrid)> =
        families.iter().flat_map(|&f| grids.iter().map(move |&g| (f, g))).collect();
    let jobs: Vec<(usize, u64)> = (0..points.len()).flat_map(|p| (0..runs as u64).map(move |k| (p, k))).collect();
    let accuracies = jobs
        .par_iter()
        .map(|&(p, k)| {
            let (family, grid) = points[p];
            let seed = base_seed.wrapping_add(k);
            let data = DataConfig {
                sizes: SplitSizes { train: SWEEP_TRAIN_SIZE, validation: SWEEP_HELD_OUT, test: SWEEP_HELD_OUT },
                grid,
                mode: FeatureMode::Diagonal,
                fidelity: 1.0,
                seed,
            };
            let ds = data.build(&[family])?;
            Ok(train_classifier(&ds, &TrainConfig { seed, ..*cfg })?.1.test_accuracy)
        })
        .collect::<Result<Vec<f64>>>()?;

    Ok(points
        .iter()
        .zip(accuracies.chunks(runs))
        .map(|(&(family, grid), acc)| {
            let mean = acc.iter().sum::<f64>() / runs as f64;
            let var = acc.iter().map(|a| (a - mean).powi(2)).sum::<f64>() / runs as f64;
            SweepRow { family, t_end: grid.t_end, steps: grid.steps, accuracies: acc.to_vec(), mean, std: var.sqrt() }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sweep_grids() {
        let g = sweep_grid(1.0).unwrap();
        assert_eq!((g.steps, g.dt()), (3, 0.5));
        assert_eq!(sweep_grid(3.0).unwrap().steps, 7);
        assert!(sweep_grid(0.5).is_err());
        assert!(sweep_grid(1.2).is_err());
    }

    #[test]
    fn sweep_table_shape() {
        let cfg = TrainConfig { epochs: 1, batch_size: 600, ..TrainConfig::default() };
        let rows = run_length_sweep(&[Family::Pauli, Family::Gad], &[1.0, 1.5], 2, 7, &cfg).unwrap();
        assert_eq!(rows.len(), 4);
        assert_eq!((rows[1].family, rows[1].steps), (Family::Pauli, 4));
        for r in &rows {
            assert_eq!(r.accuracies.len(), 2);
            assert!(r.std >= 0.0 && (0.0..=1.0).contains(&r.mean));
        }
    }
}
