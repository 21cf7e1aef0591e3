//! Configuration file layout. One JSON file per run:
//!
//! ```json
//! {"command": "plan",
//!  "parameters": {"eps0": 1e-10, "eps_th": 1e-9, "gate_count": 1e12, "p": 0.2, "p_hat": 0.4},
//!  "output_format": "json", "output_path": "plan.json", "seed": 7}
//! ```
//!
//! `command` is optional (the subcommand decides) and must agree with the
//! subcommand when present. Relative paths inside `parameters` resolve
//! against the directory holding the config file.

use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};

use ftqc::channels::NoiseModel;
use ftqc::ftcalc::{p_hat_from_success_target, FtParams};
use ftqc::io::{CircuitSpec, ComputationSpec};
use serde::{Deserialize, Deserializer};
use serde_json::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Json,
    Csv,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: Option<String>,
    #[serde(default)]
    pub parameters: Value,
    pub output_format: Option<OutputFormat>,
    pub output_path: Option<PathBuf>,
    pub seed: Option<u64>,
    #[serde(skip)]
    pub base_dir: PathBuf,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
        let mut config: RunConfig =
            serde_json::from_str(&text).with_context(|| format!("cannot parse {}", path.display()))?;
        config.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(config)
    }

    pub fn parameters<T: for<'de> Deserialize<'de>>(&self) -> Result<T> {
        let value = if self.parameters.is_null() { Value::Object(Default::default()) } else { self.parameters.clone() };
        serde_json::from_value(value).context("bad parameters")
    }

    pub fn resolve(&self, path: &Path) -> PathBuf {
        if path.is_absolute() { path.to_path_buf() } else { self.base_dir.join(path) }
    }
}

/// Accepts `1e12` as well as `1000000000000` for integer counts.
fn count<'de, D: Deserializer<'de>>(d: D) -> Result<Option<u64>, D::Error> {
    let value = Option::<f64>::deserialize(d)?;
    match value {
        None => Ok(None),
        Some(x) if x >= 0.0 && x.fract() == 0.0 && x < 1.8e19 => Ok(Some(x as u64)),
        Some(x) => Err(serde::de::Error::custom(format!("{x} is not a non-negative integer"))),
    }
}

/// Scalar planner inputs; `p_hat` or `success_target` (with `p_hat = 1 − s`).
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BudgetParams {
    pub eps0: Option<f64>,
    pub eps_th: Option<f64>,
    #[serde(default, deserialize_with = "count")]
    pub gate_count: Option<u64>,
    pub p: Option<f64>,
    pub p_hat: Option<f64>,
    pub success_target: Option<f64>,
    pub levels: Option<u32>,
    pub eps0_min: Option<f64>,
    pub eps0_max: Option<f64>,
    #[serde(default, deserialize_with = "count")]
    pub points: Option<u64>,
}

fn require<T>(value: Option<T>, name: &str) -> Result<T> {
    value.ok_or_else(|| anyhow!("missing parameter {name:?}"))
}

impl BudgetParams {
    pub fn p_hat(&self) -> Result<f64> {
        match (self.p_hat, self.success_target) {
            (Some(_), Some(_)) => bail!("give either \"p_hat\" or \"success_target\", not both"),
            (Some(p_hat), None) => Ok(p_hat),
            (None, Some(s)) => Ok(p_hat_from_success_target(s)),
            (None, None) => bail!("missing parameter \"p_hat\" (or \"success_target\")"),
        }
    }

    /// Planner record; `eps0` may be absent for grid commands.
    pub fn ft_params(&self, need_eps0: bool) -> Result<FtParams> {
        let eps0 = if need_eps0 { require(self.eps0, "eps0")? } else { self.eps0.unwrap_or(f64::NAN) };
        Ok(FtParams {
            eps0,
            eps_th: require(self.eps_th, "eps_th")?,
            gate_count: require(self.gate_count, "gate_count")?,
            p: require(self.p, "p")?,
            p_hat: self.p_hat()?,
        })
    }

    pub fn grid(&self) -> Result<(f64, f64, usize)> {
        Ok((
            require(self.eps0_min, "eps0_min")?,
            require(self.eps0_max, "eps0_max")?,
            require(self.points, "points")? as usize,
        ))
    }
}

/// Either a path to a JSON file or the object itself.
#[derive(Debug, Deserialize)]
#[serde(untagged)]
pub enum Inline<T> {
    Path(PathBuf),
    Value(T),
}

impl<T: for<'de> Deserialize<'de>> Inline<T> {
    pub fn load(self, config: &RunConfig, what: &str) -> Result<T> {
        match self {
            Inline::Value(v) => Ok(v),
            Inline::Path(p) => {
                let path = config.resolve(&p);
                let text = std::fs::read_to_string(&path)
                    .with_context(|| format!("cannot read {what} file {}", path.display()))?;
                serde_json::from_str(&text).with_context(|| format!("cannot parse {what} file {}", path.display()))
            }
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyParams {
    pub circuit: Inline<CircuitSpec>,
    pub computation: Inline<ComputationSpec>,
    #[serde(default = "NoiseModel::none")]
    pub noise: NoiseModel,
    #[serde(default = "one")]
    pub ancilla_dim: usize,
    /// When set, also estimates the worst case over random pure states.
    pub search_trials: Option<usize>,
}

fn one() -> usize {
    1
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VoteParams {
    pub per_run_failure: Option<f64>,
    #[serde(default, deserialize_with = "count")]
    pub repetitions: Option<u64>,
    pub target: Option<f64>,
}
