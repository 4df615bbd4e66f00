//! Run configuration: command-line values, optionally overridden by a JSON file.

use hspline::QuadSpec;
use serde::Deserialize;
use std::path::{Path, PathBuf};

/// Environment variable naming the grid cache directory.
pub const CACHE_ENV: &str = "HSPLINE_CACHE_DIR";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum, Default)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Table,
    Json,
    Csv,
}

/// Fields accepted in a `--config` file. Every field is optional; present
/// fields replace the corresponding command-line values.
#[derive(Debug, Clone, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub format: Option<Format>,
    pub seed: Option<u64>,
    pub cache_dir: Option<PathBuf>,
    pub abs_tol: Option<f64>,
    pub rel_tol: Option<f64>,
    pub max_depth: Option<usize>,
    pub quad_order: Option<usize>,
    pub r_tol: Option<f64>,
    pub lambda_max: Option<f64>,
    pub lambda_grid: Option<usize>,
    pub n: Option<usize>,
    pub window: Option<i64>,
    pub points: Option<usize>,
    pub h: Option<f64>,
    pub samples: Option<usize>,
    pub perturb: Option<f64>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
        serde_json::from_str(&text).map_err(|e| format!("invalid config {}: {e}", path.display()))
    }
}

/// Settings shared by all subcommands after merging.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub format: Format,
    pub seed: u64,
    pub cache_dir: PathBuf,
    pub quad: QuadSpec,
    /// Tolerance on truncated r-sums; fixes the truncation radius R.
    pub r_tol: f64,
    /// Initial λ-truncation Λ of the φ₂ slice inversion.
    pub lambda_max: f64,
    /// Points of the λ-grid on [0, 1].
    pub lambda_grid: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            format: Format::Table,
            seed: 0,
            cache_dir: PathBuf::from(".hspline-cache"),
            quad: QuadSpec { abs_tol: 1e-10, rel_tol: 1e-10, max_depth: 12, base_order: 8 },
            r_tol: 1e-9,
            lambda_max: 200.0,
            lambda_grid: 101,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), String> {
        let positive = [
            ("abs-tol", self.quad.abs_tol),
            ("rel-tol", self.quad.rel_tol),
            ("r-tol", self.r_tol),
            ("lambda-max", self.lambda_max),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(format!("{name} must be positive and finite, got {v}"));
            }
        }
        if self.quad.base_order == 0 {
            return Err("quad-order must be positive".into());
        }
        if self.lambda_grid < 11 {
            return Err(format!("lambda-grid must be at least 11, got {}", self.lambda_grid));
        }
        Ok(())
    }
}

/// Cache directory precedence: config file, then flag, then environment, then default.
pub fn resolve_cache_dir(file: Option<&PathBuf>, flag: Option<&PathBuf>, env: Option<String>) -> PathBuf {
    file.cloned()
        .or_else(|| flag.cloned())
        .or_else(|| env.filter(|s| !s.is_empty()).map(PathBuf::from))
        .unwrap_or_else(|| RunConfig::default().cache_dir)
}

/// `over` if present, else `base`.
pub fn pick<T: Clone>(over: &Option<T>, base: T) -> T {
    over.clone().unwrap_or(base)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_fields_rejected() {
        let r: Result<ConfigFile, _> = serde_json::from_str(r#"{"seed": 3, "bogus": 1}"#);
        assert!(r.is_err());
        let c: ConfigFile = serde_json::from_str(r#"{"seed": 3, "format": "json"}"#).unwrap();
        assert_eq!(c.seed, Some(3));
        assert_eq!(c.format, Some(Format::Json));
    }

    #[test]
    fn cache_dir_precedence() {
        let f = PathBuf::from("a");
        let g = PathBuf::from("b");
        assert_eq!(resolve_cache_dir(Some(&f), Some(&g), Some("c".into())), f);
        assert_eq!(resolve_cache_dir(None, Some(&g), Some("c".into())), g);
        assert_eq!(resolve_cache_dir(None, None, Some("c".into())), PathBuf::from("c"));
        assert_eq!(resolve_cache_dir(None, None, None), PathBuf::from(".hspline-cache"));
    }

    #[test]
    fn validation() {
        assert!(RunConfig::default().validate().is_ok());
        let mut c = RunConfig::default();
        c.r_tol = 0.0;
        assert!(c.validate().is_err());
    }
}
