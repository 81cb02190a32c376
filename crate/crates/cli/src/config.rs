//! Flat `section.key=value` configuration. The file is read first, then
//! command-line flags overwrite individual keys.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

pub const KEYS: &[&str] = &[
    "params.kappa",
    "params.tau",
    "surface.H",
    "surface.c",
    "surface.kind",
    "surface.ell",
    "surface.phi",
    "surface.sign",
    "surface.n",
    "polygon.lambda",
    "sweep.alpha",
    "mesh.nx",
    "mesh.ny",
    "solver.tol",
    "solver.max_iter",
    "solver.seed_mesh",
    "solver.noise",
    "solver.rng_seed",
    "tables.H",
    "tables.c",
    "output.out",
    "output.projection",
];

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone, Default)]
pub struct RunConfig {
    values: BTreeMap<String, String>,
}

impl RunConfig {
    /// Parses `key=value` lines; blank lines and `#` comments are skipped.
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut cfg = Self::default();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| ConfigError(format!("line {}: expected key=value, got {raw:?}", n + 1)))?;
            cfg.set(k.trim(), v.trim())?;
        }
        Ok(cfg)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        if !KEYS.contains(&key) {
            return Err(ConfigError(format!("unknown key {key:?}")));
        }
        self.values.insert(key.to_string(), value.to_string());
        Ok(())
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>, ConfigError> {
        match self.raw(key) {
            None => Ok(None),
            Some(v) => v.parse().map(Some).map_err(|_| ConfigError(format!("bad value for {key}: {v:?}"))),
        }
    }

    pub fn get_or<T: FromStr>(&self, key: &str, default: T) -> Result<T, ConfigError> {
        Ok(self.get(key)?.unwrap_or(default))
    }

    pub fn list(&self, key: &str) -> Result<Option<Vec<f64>>, ConfigError> {
        let Some(v) = self.raw(key) else { return Ok(None) };
        v.split(',')
            .map(|s| s.trim().parse::<f64>().map_err(|_| ConfigError(format!("bad value for {key}: {s:?}"))))
            .collect::<Result<Vec<_>, _>>()
            .map(Some)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_sections_and_comments() {
        let c =
            RunConfig::parse("# run\nsolver.tol = 1e-3\n\nsurface.H=1 # mean curvature\nsweep.alpha=1,2.5").unwrap();
        assert_eq!(c.get::<f64>("solver.tol").unwrap(), Some(1e-3));
        assert_eq!(c.get::<f64>("surface.H").unwrap(), Some(1.0));
        assert_eq!(c.list("sweep.alpha").unwrap(), Some(vec![1.0, 2.5]));
        assert_eq!(c.get::<usize>("mesh.nx").unwrap(), None);
    }

    #[test]
    fn rejects_unknown_keys_and_bad_values() {
        assert!(RunConfig::parse("solver.tolerance=1").is_err());
        assert!(RunConfig::parse("solver.tol").is_err());
        let c = RunConfig::parse("mesh.nx=ten").unwrap();
        assert!(c.get::<usize>("mesh.nx").is_err());
    }

    #[test]
    fn later_values_override() {
        let mut c = RunConfig::parse("solver.tol=1e-3").unwrap();
        c.set("solver.tol", "1e-6").unwrap();
        assert_eq!(c.get::<f64>("solver.tol").unwrap(), Some(1e-6));
    }
}
