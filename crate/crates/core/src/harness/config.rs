use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::env::{EnvSpec, Environment};
use crate::error::{Error, Result};
use crate::hoo::{HooConfig, Strategy};
use crate::partition::CoverTree;
use crate::variants::StrategyKind;

fn one() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub env: EnvSpec,
    pub strategy: StrategyKind,
    pub nu1: f64,
    pub rho: f64,
    pub horizon: u64,
    pub replications: u64,
    pub master_seed: u64,
    /// Rounds at which cumulative regret is recorded; sorted, at most `horizon`.
    pub checkpoints: Vec<u64>,
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default = "one")]
    pub workers: usize,
    /// Keep every replication's full play log in memory.
    #[serde(default)]
    pub keep_logs: bool,
}

impl ExperimentConfig {
    /// A config with one checkpoint at the horizon, one worker and no output.
    pub fn new(env: EnvSpec, strategy: StrategyKind, nu1: f64, rho: f64, horizon: u64, replications: u64) -> Self {
        ExperimentConfig {
            env,
            strategy,
            nu1,
            rho,
            horizon,
            replications,
            master_seed: 0,
            checkpoints: vec![horizon],
            output: None,
            workers: 1,
            keep_logs: false,
        }
    }

    pub fn hoo_config(&self) -> Result<HooConfig> {
        HooConfig::new(self.nu1, self.rho)
    }

    pub fn build_env(&self) -> Result<Box<dyn Environment>> {
        self.env.build()
    }

    pub fn build_strategy(&self) -> Result<Box<dyn Strategy>> {
        let cover = CoverTree::new(self.env.dimension())?;
        self.strategy.build(cover, self.hoo_config()?, self.horizon)
    }

    /// Checks every field and builds the environment and one strategy
    /// instance, so that no run starts from an unusable config.
    pub fn validate(&self) -> Result<()> {
        if self.replications == 0 {
            return Err(Error::invalid("replications", "must be at least 1"));
        }
        if self.horizon == 0 {
            return Err(Error::invalid("horizon", "must be at least 1"));
        }
        if self.workers == 0 {
            return Err(Error::invalid("workers", "must be at least 1"));
        }
        if self.checkpoints.is_empty() {
            return Err(Error::invalid("checkpoints", "need at least one"));
        }
        if self.checkpoints[0] == 0 {
            return Err(Error::invalid("checkpoints", "rounds start at 1"));
        }
        if self.checkpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid("checkpoints", "must be strictly increasing"));
        }
        if let Some(&last) = self.checkpoints.last() {
            if last > self.horizon {
                return Err(Error::invalid(
                    "checkpoints",
                    format!("round {last} exceeds the horizon {}", self.horizon),
                ));
            }
        }
        self.build_env()?;
        self.build_strategy()?;
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }
}
