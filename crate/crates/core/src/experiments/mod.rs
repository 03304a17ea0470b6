//! Training and evaluation runs: classification, noise and length studies,
//! cross-family generalization, and forecasting.

mod forecast;
mod report;
mod studies;
mod train;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use forecast::{
    forecast, forecast_data, per_sample_errors, train_forecaster, ForecastData, ForecastMetrics, ForecastTask, FORECAST_GRID,
};
pub use report::{write_forecast_csv, write_json, write_loss_csv, write_sweep_csv};
pub use studies::{
    run_generalization, run_length_sweep, run_noise_study, DataConfig, SweepRow, SWEEP_TRAIN_SIZE,
};
pub use train::{evaluate, pack_features, pack_labels, train_classifier, train_model, Confusion, Metrics};

use crate::dataset::DatasetError;
use crate::nn::{CellKind, NnError};

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Dataset(#[from] DatasetError),
    #[error(transparent)]
    Nn(#[from] NnError),
    #[error("training diverged at epoch {epoch}: {detail}")]
    Diverged { epoch: usize, detail: String },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, ExperimentError>;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub lr: f64,
    pub epochs: usize,
    pub batch_size: usize,
    /// Seeds weight initialization and the per-epoch shuffles.
    pub seed: u64,
    pub cell: CellKind,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self { lr: 1e-3, epochs: 800, batch_size: 720, seed: 0, cell: CellKind::Gru }
    }
}

impl TrainConfig {
    /// Defaults of the time-series-length sweep (batch 600).
    pub fn length_sweep() -> Self {
        Self { batch_size: 600, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lr > 0.0 && self.lr.is_finite()) {
            return Err(ExperimentError::Config(format!("learning rate {} must be positive", self.lr)));
        }
        if self.epochs == 0 || self.batch_size == 0 {
            return Err(ExperimentError::Config("epochs and batch size must be positive".into()));
        }
        Ok(())
    }
}
