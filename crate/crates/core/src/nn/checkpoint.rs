//! Model checkpoints: the header, the architecture descriptor, then one
//! parameter per line in flatten order, each in shortest round-trip form.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::params::ModelParams;
use super::{Architecture, NnError, Result};

pub const MODEL_HEADER: &str = "markovnet-model v1";

pub fn write_model(model: &ModelParams, out: &mut impl Write) -> Result<()> {
    writeln!(out, "{MODEL_HEADER}")?;
    writeln!(out, "{}", model.architecture())?;
    for x in model.flatten() {
        writeln!(out, "{x:e}")?;
    }
    Ok(())
}

pub fn save_model(model: &ModelParams, path: impl AsRef<Path>) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_model(model, &mut w)?;
    w.flush()?;
    Ok(())
}

/// Parses a checkpoint, checking the parameter count against the descriptor.
pub fn read_model(input: impl Read) -> Result<ModelParams> {
    let mut lines = BufReader::new(input).lines();
    let mut next = |n: usize| -> Result<Option<String>> {
        match lines.next() {
            Some(Ok(l)) => Ok(Some(l)),
            Some(Err(e)) => Err(NnError::Parse { line: n, message: e.to_string() }),
            None => Ok(None),
        }
    };
    match next(1)? {
        Some(h) if h == MODEL_HEADER => {}
        Some(h) if h.starts_with("markovnet-model ") => {
            return Err(NnError::Version(h["markovnet-model ".len()..].to_string()));
        }
        _ => return Err(NnError::Parse { line: 1, message: format!("expected `{MODEL_HEADER}`") }),
    }
    let arch: Architecture = next(2)?
        .ok_or_else(|| NnError::Parse { line: 2, message: "missing architecture".into() })?
        .parse()
        .map_err(|e| NnError::Parse { line: 2, message: e })?;
    let want = arch.param_count();
    let mut values = Vec::with_capacity(want);
    let mut n = 3;
    while let Some(l) = next(n)? {
        let l = l.trim();
        if !l.is_empty() {
            let v: f64 = l.parse().map_err(|e| NnError::Parse { line: n, message: format!("bad value `{l}`: {e}") })?;
            values.push(v);
        }
        n += 1;
    }
    if values.len() != want {
        return Err(NnError::Parse {
            line: n,
            message: format!("architecture has {want} parameters, file has {}", values.len()),
        });
    }
    ModelParams::unflatten(&arch, &values)
}

pub fn load_model(path: impl AsRef<Path>) -> Result<ModelParams> {
    read_model(File::open(path)?)
}
