use ndarray::{s, Array2, Array3, ArrayView2, Axis};
use serde::{Deserialize, Serialize};

use super::train::{pack_features, train_model};
use super::{ExperimentError, Result, TrainConfig};
use crate::dataset::{Dataset, FeatureMode, TimeGrid, TimeSeriesSample};
use crate::nn::{Architecture, ModelParams, NnError};

/// Forecasting grid: 11 points with spacing 0.5 on [0, 5].
pub const FORECAST_GRID: TimeGrid = TimeGrid { t_end: 5.0, steps: 11 };

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ForecastTask {
    pub input_steps: usize,
    pub output_steps: usize,
    pub components: usize,
}

impl Default for ForecastTask {
    fn default() -> Self {
        Self { input_steps: 8, output_steps: 3, components: 4 }
    }
}

impl ForecastTask {
    pub fn outputs(&self) -> usize {
        self.output_steps * self.components
    }

    pub fn total_steps(&self) -> usize {
        self.input_steps + self.output_steps
    }

    pub fn architecture(&self, cfg: &TrainConfig) -> Architecture {
        Architecture::forecaster(cfg.cell, self.components, self.outputs())
    }
}

/// Prefixes (steps × samples × components) and step-major flattened targets.
#[derive(Debug, Clone, PartialEq)]
pub struct ForecastData {
    pub inputs: Array3<f64>,
    pub targets: Array2<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForecastMetrics {
    /// Training MSE per epoch.
    pub loss_history: Vec<f64>,
    pub forecast_mse: f64,
}

/// Splits each sample into its prefix and the flattened continuation.
pub fn forecast_data(samples: &[TimeSeriesSample], task: &ForecastTask) -> Result<ForecastData> {
    for s in samples {
        let (rows, cols) = s.features.dim();
        if rows != task.total_steps() || cols < task.components {
            return Err(ExperimentError::Config(format!(
                "forecasting needs {}×{} series, got {rows}×{cols}",
                task.total_steps(),
                task.components
            )));
        }
    }
    let cut: Vec<Array2<f64>> =
        samples.iter().map(|s| s.features.slice(s![..task.input_steps, ..task.components]).to_owned()).collect();
    let inputs = pack_features(&cut)?;
    let mut targets = Array2::zeros((samples.len(), task.outputs()));
    for (mut row, s) in targets.rows_mut().into_iter().zip(samples) {
        let tail = s.features.slice(s![task.input_steps.., ..task.components]);
        row.iter_mut().zip(tail.iter()).for_each(|(r, &v)| *r = v);
    }
    Ok(ForecastData { inputs, targets })
}

fn check_dataset(ds: &Dataset, task: &ForecastTask) -> Result<()> {
    if ds.meta.mode != FeatureMode::Diagonal {
        return Err(ExperimentError::Config("forecasting uses diagonal features".into()));
    }
    if ds.meta.grid.steps != task.total_steps() {
        return Err(ExperimentError::Config(format!(
            "forecasting needs {} time steps, dataset has {}",
            task.total_steps(),
            ds.meta.grid.steps
        )));
    }
    Ok(())
}

/// Trains a forecaster on the training split with mean squared error and
/// reports the test-split MSE.
pub fn train_forecaster(ds: &Dataset, task: &ForecastTask, cfg: &TrainConfig) -> Result<(ModelParams, ForecastMetrics)> {
    check_dataset(ds, task)?;
    let train = forecast_data(&ds.train, task)?;
    let (model, loss_history, _) =
        train_model(&task.architecture(cfg), train.inputs.view(), train.targets.view(), cfg)?;
    let test = forecast_data(&ds.test, task)?;
    let forecast_mse = model.loss(test.inputs.view(), test.targets.view())?;
    Ok((model, ForecastMetrics { loss_history, forecast_mse }))
}

/// Predicts the continuation of one prefix (input_steps × components) as an
/// output_steps × components array.
pub fn forecast(model: &ModelParams, prefix: ArrayView2<'_, f64>, task: &ForecastTask) -> Result<Array2<f64>> {
    if prefix.dim() != (task.input_steps, task.components) {
        return Err(NnError::Shape(format!(
            "prefix must be {}×{}, got {:?}",
            task.input_steps,
            task.components,
            prefix.dim()
        ))
        .into());
    }
    let out = model.forward(prefix)?;
    if out.len() != task.outputs() {
        return Err(NnError::Shape(format!("model has {} outputs, task needs {}", out.len(), task.outputs())).into());
    }
    Ok(out.into_shape_with_order((task.output_steps, task.components)).expect("length checked"))
}

/// Squared error of each sample's prediction, summed over its components.
pub fn per_sample_errors(model: &ModelParams, data: &ForecastData) -> Result<Vec<f64>> {
    let pred = model.forward_batch(data.inputs.view())?;
    Ok((&pred - &data.targets).map(|d| d * d).sum_axis(Axis(1)).to_vec())
}
