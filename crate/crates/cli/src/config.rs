use std::collections::BTreeMap;
use std::path::Path;

use anyhow::{bail, Context};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Arithmetic {
    /// Kernel membership checked on floating-point elements against a tolerance.
    Float,
    /// Kernel membership checked on the exact numerators.
    #[default]
    Rational,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub max_degree: u32,
    pub quad_order: usize,
    pub tolerances: BTreeMap<String, f64>,
    pub arithmetic: Arithmetic,
    /// Number of radii in the Hardy-norm grid.
    pub r_grid: usize,
}

pub const ORTHONORMALITY: &str = "orthonormality";
pub const KERNEL: &str = "kernel";

impl Default for Config {
    fn default() -> Self {
        Config {
            max_degree: 5,
            quad_order: 24,
            tolerances: BTreeMap::from([(ORTHONORMALITY.to_string(), 1e-9), (KERNEL.to_string(), 1e-12)]),
            arithmetic: Arithmetic::Rational,
            r_grid: 16,
        }
    }
}

impl Config {
    /// Reads a config file; missing fields keep their defaults.
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let mut cfg: Config = serde_json::from_str(&text).with_context(|| format!("{}: malformed config", path.display()))?;
        for (name, value) in Config::default().tolerances {
            cfg.tolerances.entry(name).or_insert(value);
        }
        Ok(cfg)
    }

    pub fn tolerance(&self, name: &str) -> f64 {
        self.tolerances[name]
    }

    pub fn validate(&self) -> anyhow::Result<()> {
        if self.max_degree == 0 {
            bail!("max_degree must be at least 1");
        }
        if let Some((name, t)) = self.tolerances.iter().find(|(_, t)| !(**t > 0.0)) {
            bail!("tolerance `{name}` must be positive, got {t}");
        }
        let min_order = 2 * self.max_degree as usize + 4;
        if self.quad_order < min_order {
            bail!("quad_order {} is below 2 * max_degree + 4 = {min_order}", self.quad_order);
        }
        if self.r_grid == 0 {
            bail!("r_grid must be positive");
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        Config::default().validate().unwrap();
    }

    #[test]
    fn partial_file_keeps_defaults() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.json");
        std::fs::write(&path, r#"{"max_degree": 3, "tolerances": {"orthonormality": 1e-6}}"#).unwrap();
        let cfg = Config::load(&path).unwrap();
        assert_eq!(cfg.max_degree, 3);
        assert_eq!(cfg.quad_order, 24);
        assert_eq!(cfg.tolerance(ORTHONORMALITY), 1e-6);
        assert_eq!(cfg.tolerance(KERNEL), 1e-12);
    }

    #[test]
    fn rejects_low_quadrature_order_and_bad_tolerances() {
        let cfg = Config { max_degree: 10, quad_order: 20, ..Config::default() };
        assert!(cfg.validate().is_err());
        let mut cfg = Config::default();
        cfg.tolerances.insert("kernel".into(), 0.0);
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn unknown_fields_are_errors() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.json");
        std::fs::write(&path, "{\n  \"max_degre\": 3\n}").unwrap();
        let err = format!("{:#}", Config::load(&path).unwrap_err());
        assert!(err.contains("line 2"), "{err}");
    }
}
