use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use ndarray::s;
use serde::Serialize;

use super::forecast::{forecast, ForecastTask};
use super::{Result, SweepRow};
use crate::dataset::{TimeGrid, TimeSeriesSample};
use crate::nn::ModelParams;

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

/// Pretty-printed JSON with a trailing newline.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, value).map_err(std::io::Error::from)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

/// `epoch,loss,accuracy` rows, epochs counted from 1. The accuracy column is
/// left empty when `accuracy` is shorter than `loss`.
pub fn write_loss_csv(path: &Path, loss: &[f64], accuracy: &[f64]) -> Result<()> {
    let mut w = create(path)?;
    writeln!(w, "epoch,loss,accuracy")?;
    for (i, l) in loss.iter().enumerate() {
        match accuracy.get(i) {
            Some(a) => writeln!(w, "{},{l:e},{a}", i + 1)?,
            None => writeln!(w, "{},{l:e},", i + 1)?,
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_sweep_csv(path: &Path, rows: &[SweepRow]) -> Result<()> {
    let mut w = create(path)?;
    let runs = rows.first().map_or(0, |r| r.accuracies.len());
    write!(w, "family,t_end,steps,mean,std")?;
    for k in 0..runs {
        write!(w, ",run{k}")?;
    }
    writeln!(w)?;
    for r in rows {
        write!(w, "{},{},{},{},{}", r.family, r.t_end, r.steps, r.mean, r.std)?;
        for a in &r.accuracies {
            write!(w, ",{a}")?;
        }
        writeln!(w)?;
    }
    w.flush()?;
    Ok(())
}

/// Long-format `sample,time,component,actual,predicted` rows for the
/// forecast horizon of every sample.
pub fn write_forecast_csv(
    path: &Path,
    model: &ModelParams,
    task: &ForecastTask,
    grid: &TimeGrid,
    samples: &[TimeSeriesSample],
) -> Result<()> {
    let times = grid.times();
    let mut w = create(path)?;
    writeln!(w, "sample,time,component,actual,predicted")?;
    for (i, sample) in samples.iter().enumerate() {
        let pred = forecast(model, sample.features.slice(s![..task.input_steps, ..task.components]), task)?;
        for step in 0..task.output_steps {
            let row = task.input_steps + step;
            for c in 0..task.components {
                writeln!(w, "{i},{},{c},{:e},{:e}", times[row], sample.features[[row, c]], pred[[step, c]])?;
            }
        }
    }
    w.flush()?;
    Ok(())
}
