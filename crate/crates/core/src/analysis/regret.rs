//! Cumulative pseudo-regret, simple-regret recommendations and log-log
//! scaling fits.

use serde::{Deserialize, Serialize};

use crate::arm::ArmPoint;
use crate::env::Environment;
use crate::error::{Error, Result};
use crate::hoo::PlayRecord;
use crate::rng::RngStream;

/// Replications needed before a bootstrap interval is reported.
pub const MIN_REPLICATIONS: usize = 30;

/// Cumulative pseudo-regret `R_t = t f* - sum_{s<=t} f(X_s)` at a set of
/// rounds. `R_0 = 0` is implicit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegretTrace {
    pub replication: u64,
    pub strategy: String,
    pub env: String,
    pub rounds: Vec<u64>,
    pub values: Vec<f64>,
}

impl RegretTrace {
    pub fn new(rounds: Vec<u64>, values: Vec<f64>) -> Result<Self> {
        if rounds.len() != values.len() {
            return Err(Error::DimensionMismatch {
                expected: rounds.len(),
                found: values.len(),
            });
        }
        if rounds.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid("rounds", "must be strictly increasing"));
        }
        Ok(RegretTrace {
            replication: 0,
            strategy: String::new(),
            env: String::new(),
            rounds,
            values,
        })
    }

    pub fn labelled(mut self, replication: u64, strategy: &str) -> Self {
        self.replication = replication;
        self.strategy = strategy.to_string();
        self
    }

    pub fn len(&self) -> usize {
        self.rounds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rounds.is_empty()
    }

    pub fn horizon(&self) -> u64 {
        self.rounds.last().copied().unwrap_or(0)
    }

    pub fn final_value(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }

    /// `R_t` if round `t` was stored.
    pub fn value_at(&self, round: u64) -> Option<f64> {
        if round == 0 {
            return Some(0.0);
        }
        self.rounds.binary_search(&round).ok().map(|k| self.values[k])
    }

    /// Restriction of the trace to the given rounds.
    pub fn at_checkpoints(&self, checkpoints: &[u64]) -> Result<RegretTrace> {
        let values = checkpoints
            .iter()
            .map(|&t| {
                self.value_at(t)
                    .ok_or_else(|| Error::invalid("checkpoints", format!("round {t} is not in the trace")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(RegretTrace {
            replication: self.replication,
            strategy: self.strategy.clone(),
            env: self.env.clone(),
            rounds: checkpoints.to_vec(),
            values,
        })
    }

    pub fn is_nondecreasing(&self) -> bool {
        self.values.first().is_none_or(|&v| v >= 0.0) && self.values.windows(2).all(|w| w[0] <= w[1])
    }
}

/// Accumulates the per-round gaps `f* - f(X_t)` of a play log.
pub fn pseudo_regret(records: &[PlayRecord], env: &dyn Environment) -> RegretTrace {
    let f_star = env.f_star();
    let mut total = 0.0;
    let mut rounds = Vec::with_capacity(records.len());
    let mut values = Vec::with_capacity(records.len());
    for record in records {
        total += f_star - env.mean_payoff(&record.arm);
        rounds.push(record.round);
        values.push(total);
    }
    RegretTrace {
        replication: 0,
        strategy: String::new(),
        env: env.label().to_string(),
        rounds,
        values,
    }
}

/// Recommends the arm of a uniformly drawn round and returns it with its
/// simple regret `f* - f(Z_n)`.
pub fn simple_regret_recommendation(
    records: &[PlayRecord],
    env: &dyn Environment,
    rng: &mut RngStream,
) -> Result<(ArmPoint, f64)> {
    if records.is_empty() {
        return Err(Error::Empty("play log"));
    }
    let arm = records[rng.index(records.len())].arm.clone();
    let regret = env.f_star() - env.mean_payoff(&arm);
    Ok((arm, regret))
}

/// Least-squares line through `(ln n, ln y)`; returns `(slope, intercept)`.
pub fn fit_loglog(rounds: &[u64], values: &[f64]) -> Result<(f64, f64)> {
    if rounds.len() != values.len() {
        return Err(Error::DimensionMismatch {
            expected: rounds.len(),
            found: values.len(),
        });
    }
    if rounds.len() < 2 {
        return Err(Error::invalid("checkpoints", "need at least two"));
    }
    if let Some(k) = values.iter().position(|&v| !(v > 0.0)) {
        return Err(Error::Degenerate(format!(
            "non-positive mean regret {} at round {}",
            values[k], rounds[k]
        )));
    }
    let xs: Vec<f64> = rounds.iter().map(|&n| (n as f64).ln()).collect();
    let ys: Vec<f64> = values.iter().map(|v| v.ln()).collect();
    Ok(least_squares(&xs, &ys))
}

pub(crate) fn least_squares(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let k = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    /// Percentile bootstrap interval over replications (95%).
    pub ci_low: f64,
    pub ci_high: f64,
    pub checkpoints: Vec<u64>,
    pub mean_regret: Vec<f64>,
    pub replications: usize,
    pub resamples: usize,
}

impl SlopeFit {
    pub fn ci_excludes(&self, value: f64) -> bool {
        value < self.ci_low || value > self.ci_high
    }
}

fn checkpoint_matrix(traces: &[RegretTrace], checkpoints: &[u64]) -> Result<Vec<Vec<f64>>> {
    traces
        .iter()
        .map(|trace| trace.at_checkpoints(checkpoints).map(|t| t.values))
        .collect()
}

fn column_means(rows: &[Vec<f64>], picks: impl Iterator<Item = usize> + Clone, width: usize) -> Vec<f64> {
    let mut means = vec![0.0; width];
    let mut count = 0usize;
    for r in picks {
        for (m, v) in means.iter_mut().zip(&rows[r]) {
            *m += v;
        }
        count += 1;
    }
    means.iter().map(|m| m / count as f64).collect()
}

fn percentile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

/// Slope of `ln mean R_n` against `ln n` across checkpoints, with a
/// bootstrap interval obtained by resampling replications.
pub fn loglog_slope(traces: &[RegretTrace], checkpoints: &[u64], resamples: usize, seed: u64) -> Result<SlopeFit> {
    if traces.len() < MIN_REPLICATIONS {
        return Err(Error::invalid(
            "traces",
            format!("need at least {MIN_REPLICATIONS} replications, got {}", traces.len()),
        ));
    }
    if resamples == 0 {
        return Err(Error::invalid("resamples", "must be positive"));
    }
    let rows = checkpoint_matrix(traces, checkpoints)?;
    let width = checkpoints.len();
    let means = column_means(&rows, 0..rows.len(), width);
    let (slope, intercept) = fit_loglog(checkpoints, &means)?;

    let xs: Vec<f64> = checkpoints.iter().map(|&n| (n as f64).ln()).collect();
    let mut rng = RngStream::new(seed, 0);
    let mut slopes = Vec::with_capacity(resamples);
    let mut picks = vec![0usize; rows.len()];
    for _ in 0..resamples {
        for p in picks.iter_mut() {
            *p = rng.index(rows.len());
        }
        let boot = column_means(&rows, picks.iter().copied(), width);
        if boot.iter().all(|&m| m > 0.0) {
            let ys: Vec<f64> = boot.iter().map(|m| m.ln()).collect();
            slopes.push(least_squares(&xs, &ys).0);
        }
    }
    if slopes.is_empty() {
        return Err(Error::Degenerate("every bootstrap resample had a zero mean".into()));
    }
    slopes.sort_by(f64::total_cmp);
    Ok(SlopeFit {
        slope,
        intercept,
        ci_low: percentile(&slopes, 0.025),
        ci_high: percentile(&slopes, 0.975),
        checkpoints: checkpoints.to_vec(),
        mean_regret: means,
        replications: traces.len(),
        resamples,
    })
}
