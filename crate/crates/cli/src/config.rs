//! `key = value` run configuration.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use crate::error::{CliError, CliResult};

/// Every key a run file may set.
pub const KNOWN_KEYS: &[&str] = &[
    "input",
    "output_dir",
    "threads",
    "seed",
    // cutoff
    "h",
    "mu",
    "alpha",
    "sigma",
    "epsilon",
    "envelope_n",
    "n_max",
    "mode",
    "ghost_replication",
    // pair potential
    "lj_epsilon",
    "lj_sigma",
    "message_envelope_n",
    // md
    "dt",
    "steps",
    "thermostat",
    "friction",
    "temperature",
    "initial_temperature",
    "record_every",
    "rebuild_every",
    "final_frame",
    // scan
    "atom",
    "direction",
    "span",
    "scan_steps",
    // bench
    "repetitions",
    "timing",
];

#[derive(Clone, Debug, Default, PartialEq)]
pub struct RunConfig {
    values: BTreeMap<String, String>,
}

impl RunConfig {
    pub fn parse(text: &str, origin: &str) -> CliResult<Self> {
        let mut config = Self::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: String| CliError::Parse {
                path: origin.to_string(),
                line: i + 1,
                message,
            };
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| err(format!("expected `key = value`, got `{line}`")))?;
            let (key, value) = (key.trim(), value.trim());
            if value.is_empty() {
                return Err(err(format!("no value for `{key}`")));
            }
            config.set(key, value).map_err(|e| err(e.to_string()))?;
        }
        Ok(config)
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text, &path.display().to_string())
    }

    /// Sets or overrides one key; unknown keys are rejected.
    pub fn set(&mut self, key: &str, value: &str) -> CliResult<()> {
        if !KNOWN_KEYS.contains(&key) {
            return Err(CliError::Config(format!("unknown key `{key}`")));
        }
        self.values.insert(key.to_string(), value.to_string());
        Ok(())
    }

    /// Applies a `key=value` override from the command line.
    pub fn apply_override(&mut self, assignment: &str) -> CliResult<()> {
        let (key, value) = assignment
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("override `{assignment}` is not key=value")))?;
        self.set(key.trim(), value.trim())
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    pub fn get<T: FromStr>(&self, key: &str) -> CliResult<Option<T>> {
        match self.raw(key) {
            None => Ok(None),
            Some(v) => v
                .parse()
                .map(Some)
                .map_err(|_| CliError::Config(format!("cannot parse `{key} = {v}`"))),
        }
    }

    pub fn get_or<T: FromStr>(&self, key: &str, default: T) -> CliResult<T> {
        Ok(self.get(key)?.unwrap_or(default))
    }

    pub fn require<T: FromStr>(&self, key: &str, command: &str) -> CliResult<T> {
        self.get(key)?
            .ok_or_else(|| CliError::Config(format!("`{command}` needs `{key}` in the run config")))
    }

    pub fn flag(&self, key: &str, default: bool) -> CliResult<bool> {
        match self.raw(key) {
            None => Ok(default),
            Some("true" | "yes" | "1" | "T") => Ok(true),
            Some("false" | "no" | "0" | "F") => Ok(false),
            Some(v) => Err(CliError::Config(format!("`{key} = {v}` is not a boolean"))),
        }
    }

    /// Three reals separated by commas and/or whitespace.
    pub fn vector(&self, key: &str) -> CliResult<Option<[f64; 3]>> {
        let Some(v) = self.raw(key) else {
            return Ok(None);
        };
        let parts: Vec<f64> = v
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|s| !s.is_empty())
            .map(str::parse)
            .collect::<Result<_, _>>()
            .map_err(|_| CliError::Config(format!("cannot parse `{key} = {v}` as a vector")))?;
        match parts[..] {
            [x, y, z] => Ok(Some([x, y, z])),
            _ => Err(CliError::Config(format!(
                "`{key}` needs 3 components, got {}",
                parts.len()
            ))),
        }
    }
}
