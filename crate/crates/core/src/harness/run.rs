use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::regret::{fit_loglog, loglog_slope, RegretTrace, SlopeFit, MIN_REPLICATIONS};
use crate::error::{Error, Result};
use crate::hoo::PlayRecord;
use crate::rng::RngStream;

use super::config::ExperimentConfig;
use super::snapshot::{export_tree_snapshot, TreeSnapshot};

/// Bootstrap resamples used for the summary slope interval.
pub const SUMMARY_RESAMPLES: usize = 2000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicationResult {
    pub replication: u64,
    /// Cumulative pseudo-regret at the configured checkpoints.
    pub trace: RegretTrace,
    pub wall_seconds: f64,
    #[serde(skip)]
    pub log: Option<Vec<PlayRecord>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckpointSummary {
    pub round: u64,
    pub mean: f64,
    /// Standard error of the mean across replications (0 for one replication).
    pub stderr: f64,
    pub mean_per_round: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub checkpoints: Vec<CheckpointSummary>,
    /// Log-log slope with a bootstrap interval, when there are enough
    /// replications and checkpoints.
    pub slope: Option<SlopeFit>,
    /// Slope of the mean regret alone, when there are two or more checkpoints.
    pub point_slope: Option<f64>,
    pub wall_seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultBundle {
    pub config: ExperimentConfig,
    pub replications: Vec<ReplicationResult>,
    pub summary: Summary,
}

impl ResultBundle {
    pub fn traces(&self) -> Vec<RegretTrace> {
        self.replications.iter().map(|r| r.trace.clone()).collect()
    }

    /// Equality of everything except wall-clock timings.
    pub fn same_results(&self, other: &ResultBundle) -> bool {
        let strip = |b: &ResultBundle| {
            let mut b = b.clone();
            b.summary.wall_seconds = 0.0;
            b.config.workers = 1;
            for r in &mut b.replications {
                r.wall_seconds = 0.0;
            }
            b
        };
        strip(self) == strip(other)
    }
}

fn run_replication(config: &ExperimentConfig, replication: u64) -> Result<ReplicationResult> {
    let start = Instant::now();
    let env = config.build_env()?;
    let mut strategy = config.build_strategy()?;
    let mut rng = RngStream::new(config.master_seed, replication);
    let f_star = env.f_star();
    let mut log = config.keep_logs.then(|| Vec::with_capacity(config.horizon as usize));
    let mut values = Vec::with_capacity(config.checkpoints.len());
    let mut next = config.checkpoints.iter().peekable();
    let mut total = 0.0;
    for t in 1..=config.horizon {
        let record = strategy.play_round(env.as_ref(), &mut rng);
        total += f_star - env.mean_payoff(&record.arm);
        if next.peek() == Some(&&t) {
            next.next();
            values.push(total);
        }
        if let Some(log) = log.as_mut() {
            log.push(record);
        }
        if next.peek().is_none() && log.is_none() {
            break;
        }
    }
    let mut trace =
        RegretTrace::new(config.checkpoints.clone(), values)?.labelled(replication, config.strategy.label());
    trace.env = env.label().to_string();
    Ok(ReplicationResult {
        replication,
        trace,
        wall_seconds: start.elapsed().as_secs_f64(),
        log,
    })
}

fn summarise(config: &ExperimentConfig, reps: &[ReplicationResult], wall_seconds: f64) -> Result<Summary> {
    let k = reps.len() as f64;
    let checkpoints: Vec<CheckpointSummary> = config
        .checkpoints
        .iter()
        .enumerate()
        .map(|(j, &round)| {
            let mean = reps.iter().map(|r| r.trace.values[j]).sum::<f64>() / k;
            let stderr = if reps.len() > 1 {
                let var = reps.iter().map(|r| (r.trace.values[j] - mean).powi(2)).sum::<f64>() / (k - 1.0);
                (var / k).sqrt()
            } else {
                0.0
            };
            CheckpointSummary {
                round,
                mean,
                stderr,
                mean_per_round: mean / round as f64,
            }
        })
        .collect();
    let means: Vec<f64> = checkpoints.iter().map(|c| c.mean).collect();
    let point_slope = if config.checkpoints.len() >= 2 {
        fit_loglog(&config.checkpoints, &means).ok().map(|(s, _)| s)
    } else {
        None
    };
    let slope = if point_slope.is_some() && reps.len() >= MIN_REPLICATIONS {
        let traces: Vec<RegretTrace> = reps.iter().map(|r| r.trace.clone()).collect();
        Some(loglog_slope(
            &traces,
            &config.checkpoints,
            SUMMARY_RESAMPLES,
            config.master_seed,
        )?)
    } else {
        None
    };
    Ok(Summary {
        checkpoints,
        slope,
        point_slope,
        wall_seconds,
    })
}

/// Runs every replication of `config`, in parallel over `config.workers`
/// threads. Results are ordered by replication index and do not depend on
/// the number of workers.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ResultBundle> {
    config.validate()?;
    let start = Instant::now();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .map_err(|e| Error::Config(format!("worker pool: {e}")))?;
    let mut replications = pool.install(|| {
        (0..config.replications)
            .into_par_iter()
            .map(|r| run_replication(config, r))
            .collect::<Result<Vec<_>>>()
    })?;
    replications.sort_by_key(|r| r.replication);
    let summary = summarise(config, &replications, start.elapsed().as_secs_f64())?;
    Ok(ResultBundle {
        config: config.clone(),
        replications,
        summary,
    })
}

/// One replication with its full play log, per-round regret and tree
/// snapshots at the configured checkpoints.
#[derive(Debug, Clone)]
pub struct SingleRun {
    pub replication: u64,
    pub log: Vec<PlayRecord>,
    pub regret: RegretTrace,
    pub snapshots: Vec<TreeSnapshot>,
}

pub fn run_single(config: &ExperimentConfig, replication: u64) -> Result<SingleRun> {
    config.validate()?;
    let env = config.build_env()?;
    let mut strategy = config.build_strategy()?;
    let mut rng = RngStream::new(config.master_seed, replication);
    let f_star = env.f_star();
    let mut log = Vec::with_capacity(config.horizon as usize);
    let mut values = Vec::with_capacity(config.horizon as usize);
    let mut snapshots = Vec::new();
    let mut next = config.checkpoints.iter().peekable();
    let mut total = 0.0;
    for t in 1..=config.horizon {
        let record = strategy.play_round(env.as_ref(), &mut rng);
        total += f_star - env.mean_payoff(&record.arm);
        values.push(total);
        log.push(record);
        if next.peek() == Some(&&t) {
            next.next();
            snapshots.push(export_tree_snapshot(strategy.tree(), t));
        }
    }
    let mut regret =
        RegretTrace::new((1..=config.horizon).collect(), values)?.labelled(replication, config.strategy.label());
    regret.env = env.label().to_string();
    Ok(SingleRun {
        replication,
        log,
        regret,
        snapshots,
    })
}
