use std::fmt;
use std::str::FromStr;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use super::spec::{ChannelSpec, Family};
use super::DatasetError;
use crate::choi::{bell_matrix, BellDiagonal};
use crate::ClassLabel;

/// Equally spaced times 0, dt, …, T with dt = T/(steps − 1).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    pub t_end: f64,
    pub steps: usize,
}

impl TimeGrid {
    pub fn new(t_end: f64, steps: usize) -> Result<Self, DatasetError> {
        if steps < 2 {
            return Err(DatasetError::Config(format!("time grid needs at least 2 steps, got {steps}")));
        }
        if !(t_end > 0.0 && t_end.is_finite()) {
            return Err(DatasetError::Config(format!("time grid end {t_end} must be positive")));
        }
        Ok(Self { t_end, steps })
    }

    /// Grid with spacing `dt` and `steps` points.
    pub fn with_spacing(dt: f64, steps: usize) -> Result<Self, DatasetError> {
        Self::new(dt * (steps.max(2) - 1) as f64, steps)
    }

    pub fn dt(&self) -> f64 {
        self.t_end / (self.steps - 1) as f64
    }

    pub fn times(&self) -> Vec<f64> {
        let dt = self.dt();
        (0..self.steps).map(|i| if i + 1 == self.steps { self.t_end } else { i as f64 * dt }).collect()
    }
}

impl Default for TimeGrid {
    fn default() -> Self {
        Self { t_end: 3.0, steps: 7 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub enum FeatureMode {
    /// The four Bell-basis populations.
    #[default]
    Diagonal,
    /// Populations, then (Re, Im) of each upper-triangular Bell entry.
    Full,
}

/// Upper-triangular Bell-basis entries emitted in full mode, in order.
pub const FULL_OFF_DIAGONALS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

impl FeatureMode {
    pub fn width(self) -> usize {
        match self {
            FeatureMode::Diagonal => 4,
            FeatureMode::Full => 16,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            FeatureMode::Diagonal => "diagonal",
            FeatureMode::Full => "full",
        }
    }
}

impl fmt::Display for FeatureMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FeatureMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "diagonal" | "diag" => Ok(FeatureMode::Diagonal),
            "full" => Ok(FeatureMode::Full),
            other => Err(format!("unknown feature mode `{other}`")),
        }
    }
}

/// One labeled time series: `features` has one row per grid time.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeriesSample {
    pub features: Array2<f64>,
    pub label: ClassLabel,
    pub family: Family,
    pub spec: Option<ChannelSpec>,
}

/// Choi-state features of `spec` at each grid time.
pub fn features_series(spec: &ChannelSpec, grid: &TimeGrid, mode: FeatureMode) -> TimeSeriesSample {
    let times = grid.times();
    let mut features = Array2::zeros((times.len(), mode.width()));
    for (mut row, &t) in features.rows_mut().into_iter().zip(&times) {
        let b = bell_matrix(&spec.choi_at(t));
        for k in 0..4 {
            row[k] = b[(k, k)].re;
        }
        if mode == FeatureMode::Full {
            for (n, &(i, j)) in FULL_OFF_DIAGONALS.iter().enumerate() {
                row[4 + 2 * n] = b[(i, j)].re;
                row[5 + 2 * n] = b[(i, j)].im;
            }
        }
    }
    TimeSeriesSample { features, label: spec.label, family: spec.family, spec: Some(*spec) }
}

/// Werner-type noise on Bell populations: sⱼ = F·rⱼ + (1−F)/3·Σ_{i≠j} rᵢ.
pub fn apply_werner_noise(diag: &BellDiagonal, fidelity: f64) -> Result<BellDiagonal, DatasetError> {
    if !(0.0..=1.0).contains(&fidelity) {
        return Err(DatasetError::Config(format!("fidelity {fidelity} must lie in [0, 1]")));
    }
    Ok(BellDiagonal(werner(diag.0, fidelity)))
}

pub(crate) fn werner(r: [f64; 4], fidelity: f64) -> [f64; 4] {
    let w = (1.0 - fidelity) / 3.0;
    std::array::from_fn(|j| {
        let others: f64 = (0..4).filter(|&i| i != j).map(|i| r[i]).sum();
        fidelity * r[j] + w * others
    })
}
