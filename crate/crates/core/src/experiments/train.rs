use ndarray::{Array2, Array3, ArrayView2, ArrayView3, Axis};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{ExperimentError, Result, TrainConfig};
use crate::dataset::{Dataset, TimeSeriesSample};
use crate::nn::{adam_step, init_params, AdamState, Architecture, LossKind, ModelParams, NnError};
use crate::ClassLabel;

/// Counts with actual class on rows and predicted class on columns.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Confusion(pub [[u64; 3]; 3]);

impl Confusion {
    pub fn total(&self) -> u64 {
        self.0.iter().flatten().sum()
    }

    pub fn correct(&self) -> u64 {
        (0..3).map(|i| self.0[i][i]).sum()
    }

    pub fn accuracy(&self) -> f64 {
        self.correct() as f64 / self.total().max(1) as f64
    }

    pub fn row_sums(&self) -> [u64; 3] {
        self.0.map(|r| r.iter().sum())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub train_accuracy: f64,
    pub test_accuracy: f64,
    pub confusion: Confusion,
    /// Training loss per epoch, averaged per sample.
    pub loss_history: Vec<f64>,
    /// Running training accuracy per epoch, from the pre-update predictions of
    /// each minibatch.
    pub accuracy_history: Vec<f64>,
    pub forecast_mse: Option<f64>,
}

/// Stacks sample features into a steps × samples × features tensor.
pub fn pack_features<'a>(samples: impl IntoIterator<Item = &'a Array2<f64>>) -> Result<Array3<f64>> {
    let views: Vec<_> = samples.into_iter().map(|f| f.view().insert_axis(Axis(1))).collect();
    if views.is_empty() {
        return Err(ExperimentError::Config("no samples".into()));
    }
    ndarray::concatenate(Axis(1), &views)
        .map_err(|_| ExperimentError::Config("samples have different shapes".into()))
        .map(|a| a.as_standard_layout().into_owned())
}

pub fn pack_labels<'a>(labels: impl IntoIterator<Item = &'a ClassLabel>) -> Array2<f64> {
    let rows: Vec<[f64; 3]> = labels.into_iter().map(|l| l.one_hot()).collect();
    Array2::from_shape_fn((rows.len(), 3), |(i, j)| rows[i][j])
}

fn argmax(row: ndarray::ArrayView1<'_, f64>) -> usize {
    let mut best = 0;
    for (j, &v) in row.iter().enumerate() {
        if v > row[best] {
            best = j;
        }
    }
    best
}

fn confusion_of(probs: ArrayView2<'_, f64>, labels: impl IntoIterator<Item = ClassLabel>) -> Confusion {
    let mut c = Confusion::default();
    for (row, label) in probs.rows().into_iter().zip(labels) {
        c.0[label.index()][argmax(row)] += 1;
    }
    c
}

/// Confusion matrix of `model` on `samples`, predicting the argmax class.
pub fn evaluate(model: &ModelParams, samples: &[TimeSeriesSample]) -> Result<Confusion> {
    const CHUNK: usize = 1024;
    let mut c = Confusion::default();
    for chunk in samples.chunks(CHUNK) {
        let x = pack_features(chunk.iter().map(|s| &s.features))?;
        let probs = model.forward_batch(x.view())?;
        let part = confusion_of(probs.view(), chunk.iter().map(|s| s.label));
        for i in 0..3 {
            for j in 0..3 {
                c.0[i][j] += part.0[i][j];
            }
        }
    }
    Ok(c)
}

/// Minibatch Adam on (x, targets) for `cfg.epochs` epochs, returning the
/// final-epoch model, the per-sample loss per epoch, and (for softmax heads)
/// the running accuracy per epoch.
pub fn train_model(
    arch: &Architecture,
    x: ArrayView3<'_, f64>,
    targets: ArrayView2<'_, f64>,
    cfg: &TrainConfig,
) -> Result<(ModelParams, Vec<f64>, Vec<f64>)> {
    cfg.validate()?;
    let n = x.len_of(Axis(1));
    if n == 0 || targets.nrows() != n {
        return Err(ExperimentError::Config(format!("{n} inputs for {} targets", targets.nrows())));
    }
    let mut model = init_params(arch, cfg.seed)?;
    let mut flat = model.flatten();
    let mut adam = AdamState::new(flat.len(), cfg.lr);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(1);
    let classify = arch.loss_kind() == LossKind::CrossEntropy;

    let mut order: Vec<usize> = (0..n).collect();
    let mut losses = Vec::with_capacity(cfg.epochs);
    let mut accuracies = Vec::with_capacity(cfg.epochs);
    for epoch in 0..cfg.epochs {
        order.shuffle(&mut rng);
        let mut total = 0.0;
        let mut correct = 0usize;
        for idx in order.chunks(cfg.batch_size) {
            let xb = x.select(Axis(1), idx);
            let yb = targets.select(Axis(0), idx);
            let (loss, grads, out) = model.backprop(xb.view(), yb.view())?;
            if !loss.is_finite() {
                return Err(ExperimentError::Diverged { epoch, detail: format!("loss {loss}") });
            }
            if classify {
                correct += out.rows().into_iter().zip(yb.rows()).filter(|(o, y)| y[argmax(*o)] == 1.0).count();
                total += loss;
            } else {
                // mean-squared loss is already per sample
                total += loss * idx.len() as f64;
            }
            adam_step(&mut flat, &grads.flatten(), &mut adam).map_err(|e| match e {
                NnError::NonFinite(d) => ExperimentError::Diverged { epoch, detail: d },
                other => other.into(),
            })?;
            model.assign(&flat)?;
        }
        losses.push(total / n as f64);
        if classify {
            accuracies.push(correct as f64 / n as f64);
        }
    }
    Ok((model, losses, accuracies))
}

/// Trains the classifier on the training split and evaluates on the test
/// split. The validation split is not used for model selection.
pub fn train_classifier(ds: &Dataset, cfg: &TrainConfig) -> Result<(ModelParams, Metrics)> {
    let arch = Architecture::classifier(cfg.cell, ds.meta.mode.width());
    let x = pack_features(ds.train.iter().map(|s| &s.features))?;
    let y = pack_labels(ds.train.iter().map(|s| &s.label));
    let (model, loss_history, accuracy_history) = train_model(&arch, x.view(), y.view(), cfg)?;
    let train = evaluate(&model, &ds.train)?;
    let confusion = evaluate(&model, &ds.test)?;
    let metrics = Metrics {
        train_accuracy: train.accuracy(),
        test_accuracy: confusion.accuracy(),
        confusion,
        loss_history,
        accuracy_history,
        forecast_mse: None,
    };
    Ok((model, metrics))
}
