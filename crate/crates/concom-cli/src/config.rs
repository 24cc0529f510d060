//! Declarative run configuration: one TOML file describes the model, the
//! sample size, the m sweep, grids, seeds, and tolerances. The file round
//! trips losslessly through serde.

use concom::concomitant::{QuadSpec, MAX_N};
use concom::models::ModelDescriptor;
use serde::{Deserialize, Serialize};
use std::path::PathBuf;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
    Both,
}

impl OutputFormat {
    pub fn wants_csv(self) -> bool {
        matches!(self, OutputFormat::Csv | OutputFormat::Both)
    }
    pub fn wants_json(self) -> bool {
        matches!(self, OutputFormat::Json | OutputFormat::Both)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    /// Points along x, equally spaced in probability and mapped through
    /// the X-marginal quantile. Ignored when `x` is given explicitly.
    #[serde(default = "default_grid_points")]
    pub nx: usize,
    #[serde(default = "default_grid_points")]
    pub ny: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y: Option<Vec<f64>>,
}

fn default_grid_points() -> usize {
    101
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            nx: default_grid_points(),
            ny: default_grid_points(),
            x: None,
            y: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleConfig {
    /// Interior comparison points per axis for the simulation cross-check.
    #[serde(default = "default_oracle_points")]
    pub nx: usize,
    #[serde(default = "default_oracle_points")]
    pub ny: usize,
}

fn default_oracle_points() -> usize {
    5
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self { nx: 5, ny: 5 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default = "default_out_dir")]
    pub dir: PathBuf,
    #[serde(default = "default_format")]
    pub format: OutputFormat,
}

fn default_out_dir() -> PathBuf {
    PathBuf::from("out")
}

fn default_format() -> OutputFormat {
    OutputFormat::Both
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            dir: default_out_dir(),
            format: default_format(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub model: ModelDescriptor,
    pub n: usize,
    pub m_sweep: Vec<u64>,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_reps")]
    pub reps: u64,
    /// Quantile truncation of the evaluation window.
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    /// Absolute tolerance of the rank-integral quadrature.
    #[serde(default = "default_quad_tol")]
    pub quad_tol: f64,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub oracle: OracleConfig,
    #[serde(default)]
    pub output: OutputConfig,
    /// Testing hook: raw weights to use in place of the flattening family
    /// during `verify`. A vector that fails the ordered-probability-vector
    /// contract must surface as a failed check, not a crash.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub override_weights: Option<Vec<f64>>,
}

fn default_seed() -> u64 {
    42
}

fn default_reps() -> u64 {
    100_000
}

fn default_epsilon() -> f64 {
    1e-6
}

fn default_quad_tol() -> f64 {
    1e-10
}

impl ScenarioConfig {
    pub fn from_toml_str(s: &str) -> Result<Self, CliError> {
        let cfg: ScenarioConfig =
            toml::from_str(s).map_err(|e| CliError::Config(format!("config parse: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &std::path::Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!(
            "cannot read config {}: {e}",
            path.display()
        )))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("serializable config")
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let fail = |msg: String| Err(CliError::Config(msg));
        if self.n == 0 || self.n > MAX_N {
            return fail(format!("n must lie in 1..={MAX_N}, got {}", self.n));
        }
        if self.reps == 0 {
            return fail("reps must be at least 1".into());
        }
        if !(self.epsilon > 0.0 && self.epsilon <= 0.01) {
            return fail(format!("epsilon must lie in (0, 0.01], got {}", self.epsilon));
        }
        if !(self.quad_tol > 0.0 && self.quad_tol.is_finite()) {
            return fail(format!("quad_tol must be positive, got {}", self.quad_tol));
        }
        for (axis, explicit, count) in [
            ("x", &self.grid.x, self.grid.nx),
            ("y", &self.grid.y, self.grid.ny),
        ] {
            match explicit {
                Some(pts) => {
                    if pts.len() < 2 {
                        return fail(format!("explicit {axis} grid needs at least 2 points"));
                    }
                    if pts.windows(2).any(|w| w[0] >= w[1]) {
                        return fail(format!("explicit {axis} grid must be strictly increasing"));
                    }
                }
                None => {
                    if count < 2 {
                        return fail(format!("grid n{axis} must be at least 2, got {count}"));
                    }
                }
            }
        }
        if self.oracle.nx == 0 || self.oracle.ny == 0 {
            return fail("oracle grid sizes must be at least 1".into());
        }
        // model parameters are validated by construction
        self.model
            .build()
            .map_err(|e| CliError::Config(format!("model: {e}")))?;
        Ok(())
    }

    pub fn quad_spec(&self) -> QuadSpec {
        QuadSpec {
            abs_tol: self.quad_tol,
            max_panels: 1 << 14,
            window_eps: self.epsilon,
        }
    }
}
