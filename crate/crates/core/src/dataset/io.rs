//! Text dataset format.
//!
//! ```text
//! markovnet-dataset v1
//! mode=diagonal
//! fidelity=1
//! t_end=3
//! steps=7
//! seed=42
//! families=dephasing-rb,pauli
//! train=7200
//! validation=900
//! test=900
//! provenance=generated
//! 0,dephasing-rb,1.0000000000000000e0,...
//! ```
//!
//! Records hold `label,family` and the feature matrix row by row. Features
//! are written with 17 significant digits, which round-trips binary64. Paths
//! ending in `.gz` are gzip-compressed.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use flate2::read::GzDecoder;
use flate2::write::GzEncoder;
use flate2::Compression;
use ndarray::Array2;

use super::{
    assignment, sample_channel, sample_seed, validate_sample, Dataset, DatasetError, DatasetMeta, Family,
    FeatureMode, Provenance, Result, SplitSizes, TimeGrid, TimeSeriesSample,
};
use crate::ClassLabel;

pub const FORMAT_HEADER: &str = "markovnet-dataset v1";

const KEYS: [&str; 10] =
    ["mode", "fidelity", "t_end", "steps", "seed", "families", "train", "validation", "test", "provenance"];

fn is_gzip(path: &Path) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("gz"))
}

fn write_body(ds: &Dataset, out: &mut impl Write) -> std::io::Result<()> {
    let m = &ds.meta;
    let s = ds.sizes();
    let families: Vec<&str> = m.families.iter().map(|f| f.name()).collect();
    writeln!(out, "{FORMAT_HEADER}")?;
    writeln!(out, "mode={}", m.mode)?;
    writeln!(out, "fidelity={}", m.fidelity)?;
    writeln!(out, "t_end={}", m.grid.t_end)?;
    writeln!(out, "steps={}", m.grid.steps)?;
    writeln!(out, "seed={}", m.seed)?;
    writeln!(out, "families={}", families.join(","))?;
    writeln!(out, "train={}\nvalidation={}\ntest={}", s.train, s.validation, s.test)?;
    writeln!(out, "provenance={}", m.provenance)?;
    for sample in ds.samples() {
        write!(out, "{},{}", sample.label.index(), sample.family)?;
        for x in sample.features.iter() {
            write!(out, ",{x:.16e}")?;
        }
        writeln!(out)?;
    }
    Ok(())
}

/// Writes `ds` to `path`.
pub fn save_dataset(ds: &Dataset, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = BufWriter::new(File::create(path)?);
    if is_gzip(path) {
        let mut enc = GzEncoder::new(file, Compression::default());
        write_body(ds, &mut enc)?;
        enc.finish()?.flush()?;
    } else {
        let mut file = file;
        write_body(ds, &mut file)?;
        file.flush()?;
    }
    Ok(())
}

fn read_text(path: &Path) -> Result<String> {
    let mut raw = Vec::new();
    File::open(path)?.read_to_end(&mut raw)?;
    if is_gzip(path) {
        let mut text = Vec::new();
        if let Err(e) = GzDecoder::new(raw.as_slice()).read_to_end(&mut text) {
            let line = text.iter().filter(|&&b| b == b'\n').count() + 1;
            return Err(DatasetError::Parse { line, message: format!("corrupt gzip stream: {e}") });
        }
        raw = text;
    }
    String::from_utf8(raw).map_err(|e| {
        let line = e.as_bytes()[..e.utf8_error().valid_up_to()].iter().filter(|&&b| b == b'\n').count() + 1;
        DatasetError::Parse { line, message: "invalid UTF-8".into() }
    })
}

fn parse_err(line: usize, message: impl Into<String>) -> DatasetError {
    DatasetError::Parse { line, message: message.into() }
}

fn field<T: std::str::FromStr>(meta: &BTreeMap<&str, (usize, &str)>, key: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    let (line, value) = meta[key];
    value.parse().map_err(|e| parse_err(line, format!("bad value for `{key}`: {e}")))
}

/// Reads a dataset written by [`save_dataset`]. Every sample is checked
/// against the population constraints; for generated datasets the channel
/// specs are rebuilt from the seed.
pub fn load_dataset(path: impl AsRef<Path>) -> Result<Dataset> {
    let text = read_text(path.as_ref())?;
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l)).peekable();

    match lines.next() {
        Some((_, h)) if h == FORMAT_HEADER => {}
        Some((_, h)) if h.starts_with("markovnet-dataset ") => {
            return Err(DatasetError::Version(h["markovnet-dataset ".len()..].to_string()));
        }
        Some((n, _)) => return Err(parse_err(n, format!("expected `{FORMAT_HEADER}`"))),
        None => return Err(parse_err(1, "empty file")),
    }

    let mut meta: BTreeMap<&str, (usize, &str)> = BTreeMap::new();
    let mut last = 1;
    while let Some(&(n, l)) = lines.peek() {
        let Some((k, v)) = l.split_once('=') else { break };
        let k = k.trim();
        if !KEYS.contains(&k) {
            return Err(parse_err(n, format!("unknown metadata key `{k}`")));
        }
        if meta.insert(k, (n, v.trim())).is_some() {
            return Err(parse_err(n, format!("duplicate metadata key `{k}`")));
        }
        last = n;
        lines.next();
    }
    if let Some(missing) = KEYS.iter().find(|k| !meta.contains_key(*k)) {
        return Err(parse_err(last + 1, format!("missing metadata key `{missing}`")));
    }

    let mode: FeatureMode = field(&meta, "mode")?;
    let fidelity: f64 = field(&meta, "fidelity")?;
    let steps: usize = field(&meta, "steps")?;
    let t_end: f64 = field(&meta, "t_end")?;
    let grid = TimeGrid::new(t_end, steps).map_err(|e| parse_err(meta["steps"].0, e.to_string()))?;
    let (fam_line, fam_text) = meta["families"];
    let families = Family::parse_list(fam_text).map_err(|e| parse_err(fam_line, e))?;
    let sizes = SplitSizes {
        train: field(&meta, "train")?,
        validation: field(&meta, "validation")?,
        test: field(&meta, "test")?,
    };
    let meta = DatasetMeta {
        mode,
        fidelity,
        grid,
        seed: field(&meta, "seed")?,
        families,
        provenance: field(&meta, "provenance")?,
    };

    let width = steps * mode.width();
    let total = sizes.total();
    let mut samples = Vec::with_capacity(total);
    for (n, l) in lines {
        let index = samples.len();
        if index == total {
            return Err(parse_err(n, format!("more than the declared {total} records")));
        }
        let mut parts = l.split(',');
        let label: ClassLabel = parts
            .next()
            .unwrap_or("")
            .parse()
            .map_err(|e| parse_err(n, format!("bad label: {e}")))?;
        let family: Family = parts
            .next()
            .ok_or_else(|| parse_err(n, "missing family"))?
            .parse()
            .map_err(|e: String| parse_err(n, e))?;
        let values = parts
            .map(|p| p.trim().parse::<f64>().map_err(|e| parse_err(n, format!("bad feature `{p}`: {e}"))))
            .collect::<Result<Vec<f64>>>()?;
        if values.len() != width {
            return Err(parse_err(n, format!("expected {width} features, found {}", values.len())));
        }
        let features = Array2::from_shape_vec((steps, mode.width()), values).expect("length checked");

        let local = sizes.local_index(index);
        let spec = match meta.provenance {
            Provenance::Generated => {
                if assignment(local, &meta.families) != (label, family) {
                    return Err(DatasetError::Invalid {
                        index,
                        message: format!("record {label}/{family} does not match the generation order"),
                    });
                }
                Some(sample_channel(family, label, sample_seed(meta.seed, index as u64)))
            }
            Provenance::None => None,
        };
        let sample = TimeSeriesSample { features, label, family, spec };
        validate_sample(&sample, index)?;
        samples.push(sample);
    }
    if samples.len() != total {
        let line = text.lines().count() + 1;
        return Err(parse_err(line, format!("expected {total} records, found {}", samples.len())));
    }

    let test = samples.split_off(sizes.train + sizes.validation);
    let validation = samples.split_off(sizes.train);
    Ok(Dataset { meta, train: samples, validation, test })
}
