//! Flat `key = value` experiment files.
//!
//! Blank lines and lines starting with `#` are ignored. Keys are the long
//! flag names without the leading dashes, e.g. `alpha = 1.8` or
//! `tol-rho = 1e-7`.

use std::collections::BTreeMap;
use std::path::Path;

use anyhow::{bail, Context, Result};

pub const KEYS: &[&str] = &[
    "example",
    "alpha",
    "T",
    "sigma",
    "seed",
    "seeds",
    "g",
    "Jmax",
    "reg",
    "rho",
    "tol-rho",
    "out-dir",
    "diffusivity",
];

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigFile {
    entries: BTreeMap<String, String>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (no, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                bail!("line {}: expected key = value", no + 1);
            };
            let (k, v) = (k.trim(), v.trim());
            if !KEYS.contains(&k) {
                bail!("line {}: unknown key `{k}`", no + 1);
            }
            entries.insert(k.to_string(), v.to_string());
        }
        Ok(Self { entries })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("in {}", path.display()))
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    pub fn parsed<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        match self.get(key) {
            None => Ok(None),
            Some(v) => v
                .parse::<T>()
                .map(Some)
                .map_err(|e| anyhow::anyhow!("config key `{key}`: {e}")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_rejects() {
        let c = ConfigFile::parse("# comment\nalpha = 1.8\n\nreg=h1\n").unwrap();
        assert_eq!(c.parsed::<f64>("alpha").unwrap(), Some(1.8));
        assert_eq!(c.get("reg"), Some("h1"));
        assert_eq!(c.get("sigma"), None);
        assert!(ConfigFile::parse("nonsense").is_err());
        assert!(ConfigFile::parse("colour = red").is_err());
    }
}
