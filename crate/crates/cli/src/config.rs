//! Flat `key = value` run configuration with command-line overrides.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

/// Settings keyed by name; later sources override earlier ones.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunConfig {
    values: BTreeMap<String, String>,
}

pub const KEYS: &[&str] = &[
    "system", "n", "m", "size", "z0", "t", "h", "method", "rtol", "atol", "stride", "seed", "out", "problem", "domain",
    "grid", "k", "map", "vectors", "compare", "rel_tol", "f", "g",
];

impl RunConfig {
    /// Parses `key = value` lines; `#` starts a comment.
    pub fn parse(src: &str) -> Result<Self, ConfigError> {
        let mut cfg = RunConfig::default();
        for (lineno, raw) in src.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| ConfigError(format!("line {}: expected key = value", lineno + 1)))?;
            cfg.set(k.trim(), v.trim())?;
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let src = std::fs::read_to_string(path)
            .map_err(|e| ConfigError(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&src)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        if !KEYS.contains(&key) {
            return Err(ConfigError(format!("unknown config key {key}")));
        }
        self.values.insert(key.to_string(), value.to_string());
        Ok(())
    }

    pub fn set_opt<T: ToString>(&mut self, key: &str, value: Option<T>) -> Result<(), ConfigError> {
        match value {
            Some(v) => self.set(key, &v.to_string()),
            None => Ok(()),
        }
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>, ConfigError> {
        match self.raw(key) {
            None => Ok(None),
            Some(v) => v.parse().map(Some).map_err(|_| ConfigError(format!("invalid value for {key}: {v}"))),
        }
    }

    pub fn get_or<T: FromStr>(&self, key: &str, default: T) -> Result<T, ConfigError> {
        Ok(self.get(key)?.unwrap_or(default))
    }

    pub fn require(&self, key: &str) -> Result<&str, ConfigError> {
        self.raw(key).ok_or_else(|| ConfigError(format!("missing required setting {key}")))
    }

    /// Comma-separated floats.
    pub fn floats(&self, key: &str) -> Result<Option<Vec<f64>>, ConfigError> {
        match self.raw(key) {
            None => Ok(None),
            Some(v) => v
                .split(',')
                .map(|s| s.trim().parse::<f64>())
                .collect::<Result<Vec<_>, _>>()
                .map(Some)
                .map_err(|_| ConfigError(format!("invalid list for {key}: {v}"))),
        }
    }

    /// `a:b` with `a < b`.
    pub fn interval(&self, key: &str) -> Result<Option<(f64, f64)>, ConfigError> {
        match self.raw(key) {
            None => Ok(None),
            Some(v) => {
                let bad = || ConfigError(format!("invalid interval for {key}: {v} (expected a:b)"));
                let (a, b) = v.split_once(':').ok_or_else(bad)?;
                let (a, b) = (a.trim().parse::<f64>().map_err(|_| bad())?, b.trim().parse::<f64>().map_err(|_| bad())?);
                if !(a < b) {
                    return Err(bad());
                }
                Ok(Some((a, b)))
            }
        }
    }
}
