//! Recurrent classifiers and forecasters with hand-derived gradients.
//!
//! Batches are laid out time-major as `(steps, batch, features)` so that the
//! slice for one time step is a contiguous row-major matrix. All arithmetic is
//! binary64 and single-threaded within a model, which makes every forward and
//! backward pass bit-reproducible.

mod adam;
mod cells;
mod checkpoint;
mod gradcheck;
mod loss;
mod model;
mod params;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use adam::{adam_step, AdamState};
pub use cells::{gru_forward, lstm_forward, GruCache, LstmCache};
pub use checkpoint::{load_model, read_model, save_model, write_model, MODEL_HEADER};
pub use gradcheck::{grad_check, GradCheckReport};
pub use loss::{cce_loss, mse_loss, softmax_rows, LOG_CLAMP};
pub use model::{LossValue, ModelCache};
pub use params::{init_params, DenseParams, GruParams, LstmParams, ModelParams, RecurrentParams};

#[derive(Debug, Error)]
pub enum NnError {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error("non-finite {0}")]
    NonFinite(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("unsupported model format version `{0}`")]
    Version(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, NnError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CellKind {
    Gru,
    Lstm,
}

impl CellKind {
    pub fn name(self) -> &'static str {
        match self {
            CellKind::Gru => "gru",
            CellKind::Lstm => "lstm",
        }
    }
}

impl fmt::Display for CellKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CellKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "gru" => Ok(CellKind::Gru),
            "lstm" => Ok(CellKind::Lstm),
            other => Err(format!("unknown cell `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Activation {
    Relu,
    Softmax,
    Identity,
}

impl Activation {
    pub fn name(self) -> &'static str {
        match self {
            Activation::Relu => "relu",
            Activation::Softmax => "softmax",
            Activation::Identity => "identity",
        }
    }
}

impl FromStr for Activation {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "relu" => Ok(Activation::Relu),
            "softmax" => Ok(Activation::Softmax),
            "identity" | "linear" => Ok(Activation::Identity),
            other => Err(format!("unknown activation `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LossKind {
    /// Summed categorical cross-entropy on a softmax head.
    CrossEntropy,
    /// Mean over samples of the squared residual norm.
    MeanSquared,
}

/// Layer sizes of a model: an optional recurrent cell whose final hidden
/// state feeds a stack of dense layers. Without a cell the dense stack reads
/// the last time step directly.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Architecture {
    pub cell: Option<CellKind>,
    pub input: usize,
    pub hidden: usize,
    pub dense: Vec<(usize, Activation)>,
}

impl Architecture {
    /// Cell(32) → Dense(16, ReLU) → Dense(3, softmax).
    pub fn classifier(cell: CellKind, input: usize) -> Self {
        Self {
            cell: Some(cell),
            input,
            hidden: 32,
            dense: vec![(16, Activation::Relu), (3, Activation::Softmax)],
        }
    }

    /// Cell(64) → Dense(64, ReLU) → Dense(outputs, identity).
    pub fn forecaster(cell: CellKind, input: usize, outputs: usize) -> Self {
        Self {
            cell: Some(cell),
            input,
            hidden: 64,
            dense: vec![(64, Activation::Relu), (outputs, Activation::Identity)],
        }
    }

    /// Width of the vector handed to the first dense layer.
    pub fn head_input(&self) -> usize {
        if self.cell.is_some() { self.hidden } else { self.input }
    }

    pub fn outputs(&self) -> usize {
        self.dense.last().map_or(self.head_input(), |d| d.0)
    }

    pub fn loss_kind(&self) -> LossKind {
        match self.dense.last() {
            Some((_, Activation::Softmax)) => LossKind::CrossEntropy,
            _ => LossKind::MeanSquared,
        }
    }

    pub fn param_count(&self) -> usize {
        let (h, d) = (self.hidden, self.input);
        let cell = match self.cell {
            None => 0,
            Some(CellKind::Gru) => 3 * (h * d + h * h + h),
            Some(CellKind::Lstm) => 4 * (h * (h + d) + h),
        };
        let mut width = self.head_input();
        let mut dense = 0;
        for &(n, _) in &self.dense {
            dense += n * width + n;
            width = n;
        }
        cell + dense
    }

    pub fn validate(&self) -> Result<()> {
        if self.input == 0 || (self.cell.is_some() && self.hidden == 0) {
            return Err(NnError::Shape("zero-width input or hidden layer".into()));
        }
        if self.dense.is_empty() || self.dense.iter().any(|d| d.0 == 0) {
            return Err(NnError::Shape("dense stack must be non-empty with positive widths".into()));
        }
        let last = self.dense.len() - 1;
        if self.dense.iter().enumerate().any(|(i, d)| d.1 == Activation::Softmax && i != last) {
            return Err(NnError::Shape("softmax is only supported on the output layer".into()));
        }
        Ok(())
    }
}

/// `cell=gru input=4 hidden=32 dense=16:relu,3:softmax`
impl fmt::Display for Architecture {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cell = self.cell.map_or("none", CellKind::name);
        let dense: Vec<String> = self.dense.iter().map(|(n, a)| format!("{n}:{}", a.name())).collect();
        write!(f, "cell={cell} input={} hidden={} dense={}", self.input, self.hidden, dense.join(","))
    }
}

impl FromStr for Architecture {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let (mut cell, mut input, mut hidden, mut dense) = (None, None, None, None);
        for tok in s.split_whitespace() {
            let (k, v) = tok.split_once('=').ok_or_else(|| format!("expected key=value, got `{tok}`"))?;
            let num = |v: &str| v.parse::<usize>().map_err(|e| format!("bad `{k}`: {e}"));
            match k {
                "cell" => cell = Some(if v == "none" { None } else { Some(v.parse()?) }),
                "input" => input = Some(num(v)?),
                "hidden" => hidden = Some(num(v)?),
                "dense" => {
                    let layers = v
                        .split(',')
                        .map(|l| {
                            let (n, a) = l.split_once(':').ok_or_else(|| format!("bad layer `{l}`"))?;
                            Ok((n.parse::<usize>().map_err(|e| format!("bad width `{n}`: {e}"))?, a.parse()?))
                        })
                        .collect::<std::result::Result<Vec<_>, String>>()?;
                    dense = Some(layers);
                }
                other => return Err(format!("unknown architecture key `{other}`")),
            }
        }
        let arch = Architecture {
            cell: cell.ok_or("missing `cell`")?,
            input: input.ok_or("missing `input`")?,
            hidden: hidden.ok_or("missing `hidden`")?,
            dense: dense.ok_or("missing `dense`")?,
        };
        arch.validate().map_err(|e| e.to_string())?;
        Ok(arch)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classifier_parameter_count() {
        let a = Architecture::classifier(CellKind::Gru, 4);
        assert_eq!(a.param_count(), 3552 + 528 + 51);
        assert_eq!(a.param_count(), 4131);
    }

    #[test]
    fn descriptor_round_trips() {
        for a in [
            Architecture::classifier(CellKind::Lstm, 16),
            Architecture::forecaster(CellKind::Gru, 4, 12),
            Architecture { cell: None, input: 3, hidden: 0, dense: vec![(2, Activation::Identity)] },
        ] {
            assert_eq!(a.to_string().parse::<Architecture>().unwrap(), a);
        }
        assert!("cell=gru input=4 hidden=8 dense=3:softmax,2:relu".parse::<Architecture>().is_err());
        assert!("cell=rnn input=4 hidden=8 dense=3:softmax".parse::<Architecture>().is_err());
    }
}
