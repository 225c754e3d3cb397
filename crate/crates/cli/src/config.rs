//! Experiment configuration file.

use std::path::{Path, PathBuf};

use cbleak_core::attack::GaConfig;
use cbleak_core::leakage::{BA_DEFAULT_DELTA, BA_MAX_ITERATIONS, DEFAULT_BIN_WIDTH};
use cbleak_core::metrics::DEFAULT_MAX_NON_MATED;
use cbleak_core::rng::derive_seed;
use cbleak_core::{DatasetSpec, SchemeSpec};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub dataset: DatasetSpec,
    /// Compromised system.
    pub sys_c: SystemConfig,
    /// Target system; normal evaluation and leakage run on it.
    pub sys_t: SystemConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub attack: Option<AttackConfig>,
    #[serde(default)]
    pub leakage: LeakageConfig,
    pub metrics: MetricsConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepConfig>,
    /// Used when `--out` is not given.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemConfig {
    pub transform: SchemeSpec,
    pub key_seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AttackConfig {
    pub seed: u64,
    #[serde(default = "one")]
    pub n_templates: usize,
    /// Identities to attack; all of them when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub identities: Option<Vec<usize>>,
    /// GA parameters. Its `seed` must be left out: `seed` above is used.
    #[serde(default)]
    pub ga: GaConfig,
    #[serde(default = "yes")]
    pub write_traces: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LeakageConfig {
    #[serde(default = "default_bin_width")]
    pub bin_width: f64,
    #[serde(default = "default_delta")]
    pub delta: f64,
    #[serde(default = "default_max_iterations")]
    pub max_iterations: usize,
}

impl Default for LeakageConfig {
    fn default() -> Self {
        Self {
            bin_width: DEFAULT_BIN_WIDTH,
            delta: BA_DEFAULT_DELTA,
            max_iterations: BA_MAX_ITERATIONS,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetricsConfig {
    /// Seed of the non-mated pair subsample.
    pub seed: u64,
    #[serde(default = "default_max_non_mated")]
    pub max_non_mated: usize,
    /// Also write every normal score to `scores.csv`.
    #[serde(default)]
    pub dump_scores: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepTarget {
    Both,
    SysC,
    SysT,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    /// A transform parameter (`l`, `m`, `q`, `alpha`, ...) or `n_templates`.
    pub parameter: String,
    pub values: Vec<f64>,
    #[serde(default = "default_target")]
    pub target: SweepTarget,
    #[serde(default)]
    pub attack: bool,
    #[serde(default)]
    pub leakage: bool,
}

fn one() -> usize {
    1
}

fn yes() -> bool {
    true
}

fn default_bin_width() -> f64 {
    DEFAULT_BIN_WIDTH
}

fn default_delta() -> f64 {
    BA_DEFAULT_DELTA
}

fn default_max_iterations() -> usize {
    BA_MAX_ITERATIONS
}

fn default_max_non_mated() -> usize {
    DEFAULT_MAX_NON_MATED
}

fn default_target() -> SweepTarget {
    SweepTarget::Both
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(format!("cannot read {}: {e}", path.display())))?;
        let config: Self = serde_json::from_str(&text).map_err(|e| CliError::config(format!("{}: {e}", path.display())))?;
        config.check()?;
        Ok(config)
    }

    /// Checks that only need the file itself; scheme/dataset compatibility is
    /// checked when keys are drawn.
    pub fn check(&self) -> Result<(), CliError> {
        if let Some(attack) = &self.attack {
            if attack.ga.seed != 0 {
                return Err(CliError::config("attack.ga.seed is not used; set attack.seed"));
            }
            attack.ga.validate().map_err(CliError::from_setup)?;
            if attack.n_templates < 1 {
                return Err(CliError::config("attack.n_templates must be at least 1"));
            }
            if attack.identities.as_ref().is_some_and(Vec::is_empty) {
                return Err(CliError::config("attack.identities must not be empty"));
            }
        }
        let l = &self.leakage;
        if !(l.bin_width > 0.0 && l.bin_width.is_finite()) || !(l.delta > 0.0) || l.max_iterations == 0 {
            return Err(CliError::config("leakage: bin_width and delta must be positive, max_iterations at least 1"));
        }
        if self.metrics.max_non_mated == 0 {
            return Err(CliError::config("metrics.max_non_mated must be at least 1"));
        }
        Ok(())
    }

    /// Replaces every seed with one derived from `master`.
    pub fn with_seed_override(&self, master: u64) -> Self {
        let mut out = self.clone();
        out.dataset = self.dataset.with_seed(derive_seed(master, "cli/dataset"));
        out.sys_c.key_seed = derive_seed(master, "cli/sys_c");
        out.sys_t.key_seed = derive_seed(master, "cli/sys_t");
        out.metrics.seed = derive_seed(master, "cli/metrics");
        if let Some(attack) = &mut out.attack {
            attack.seed = derive_seed(master, "cli/attack");
        }
        out
    }

    pub fn ga_config(&self) -> Result<(GaConfig, &AttackConfig), CliError> {
        let attack = self
            .attack
            .as_ref()
            .ok_or_else(|| CliError::config("this command needs an `attack` section"))?;
        Ok((
            GaConfig {
                seed: attack.seed,
                ..attack.ga.clone()
            },
            attack,
        ))
    }
}
