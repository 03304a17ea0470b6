//! Flat `key = value` configuration files.
//!
//! Blank lines and lines starting with `#` are skipped. Keys use the long
//! flag names; dashes and underscores are interchangeable.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::path::Path;
use std::str::FromStr;

use anyhow::Context;

/// Invalid invocation or configuration; exits with the usage code.
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
pub struct UsageError(pub String);

#[derive(Debug, Default)]
pub struct Settings {
    values: BTreeMap<String, String>,
}

fn normalize(key: &str) -> String {
    key.trim().replace('-', "_")
}

impl Settings {
    pub fn parse(text: &str) -> Result<Self, UsageError> {
        let mut values = BTreeMap::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| UsageError(format!("config line {}: expected key=value", n + 1)))?;
            let key = normalize(k);
            if key.is_empty() {
                return Err(UsageError(format!("config line {}: empty key", n + 1)));
            }
            if values.insert(key.clone(), v.trim().to_string()).is_some() {
                return Err(UsageError(format!("config line {}: duplicate key `{key}`", n + 1)));
            }
        }
        Ok(Self { values })
    }

    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        Ok(Self::parse(&text).with_context(|| format!("in config {}", path.display()))?)
    }

    pub fn check_keys(&self, allowed: &[&str]) -> Result<(), UsageError> {
        match self.values.keys().find(|k| !allowed.contains(&k.as_str())) {
            Some(k) => Err(UsageError(format!("unknown config key `{k}` for this command"))),
            None => Ok(()),
        }
    }

    /// The flag value if given, else the config value.
    pub fn value(&self, key: &str, flag: Option<String>) -> Result<Option<String>, UsageError> {
        Ok(flag.or_else(|| self.values.get(key).cloned()))
    }

    /// Flag, then config, then `default`.
    pub fn get<T>(&self, key: &str, flag: Option<T>, default: T) -> Result<T, UsageError>
    where
        T: FromStr,
        T::Err: Display,
    {
        if let Some(v) = flag {
            return Ok(v);
        }
        match self.values.get(key) {
            Some(raw) => raw.parse().map_err(|e| UsageError(format!("config key `{key}`: {e}"))),
            None => Ok(default),
        }
    }

    /// Like [`Settings::get`] for values whose flag is kept as a string.
    pub fn parsed<T>(&self, key: &str, flag: Option<String>, default: T) -> Result<T, UsageError>
    where
        T: FromStr,
        T::Err: Display,
    {
        match self.value(key, flag)? {
            Some(raw) => raw.parse().map_err(|e| UsageError(format!("`{key}`: {e}"))),
            None => Ok(default),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precedence() {
        let s = Settings::parse("# comment\nepochs = 5\nbatch-size=10\n\n").unwrap();
        assert_eq!(s.get("epochs", None, 800usize).unwrap(), 5);
        assert_eq!(s.get("epochs", Some(7usize), 800).unwrap(), 7);
        assert_eq!(s.get("batch_size", None, 720usize).unwrap(), 10);
        assert_eq!(s.get("lr", None, 1e-3).unwrap(), 1e-3);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(Settings::parse("epochs 5").is_err());
        assert!(Settings::parse("a=1\na=2").is_err());
        let s = Settings::parse("epochz=5").unwrap();
        assert!(s.check_keys(&["epochs"]).is_err());
        let s = Settings::parse("epochs=many").unwrap();
        assert!(s.get("epochs", None, 1usize).is_err());
    }
}
