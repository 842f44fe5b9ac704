use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::analysis::regret::RegretTrace;
use crate::error::{Error, Result};
use crate::hoo::PlayRecord;

use super::config::ExperimentConfig;
use super::run::{ResultBundle, Summary};

fn csv_error(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

/// `round,replication,cum_pseudo_regret`, replication-major.
pub fn write_regret_csv<W: Write>(bundle: &ResultBundle, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["round", "replication", "cum_pseudo_regret"])
        .map_err(csv_error)?;
    for r in &bundle.replications {
        for (round, value) in r.trace.rounds.iter().zip(&r.trace.values) {
            w.serialize((round, r.replication, value)).map_err(csv_error)?;
        }
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct Sidecar<'a> {
    config: &'a ExperimentConfig,
    summary: &'a Summary,
    wall_seconds: Vec<f64>,
}

pub fn write_summary_json<W: Write>(bundle: &ResultBundle, out: W) -> Result<()> {
    let sidecar = Sidecar {
        config: &bundle.config,
        summary: &bundle.summary,
        wall_seconds: bundle.replications.iter().map(|r| r.wall_seconds).collect(),
    };
    serde_json::to_writer_pretty(out, &sidecar).map_err(|e| Error::Io(e.to_string()))
}

/// Writes `regret.csv` and `summary.json` under `dir`; returns both paths.
pub fn write_bundle(bundle: &ResultBundle, dir: &Path) -> Result<(PathBuf, PathBuf)> {
    fs::create_dir_all(dir)?;
    let csv_path = dir.join("regret.csv");
    let json_path = dir.join("summary.json");
    write_regret_csv(bundle, fs::File::create(&csv_path)?)?;
    write_summary_json(bundle, fs::File::create(&json_path)?)?;
    Ok((csv_path, json_path))
}

/// One row per round: `t,h,i,x0..x{D-1},y,cum_pseudo_regret`.
pub fn write_play_trace_csv<W: Write>(log: &[PlayRecord], regret: &RegretTrace, out: W) -> Result<()> {
    if log.len() != regret.len() {
        return Err(Error::DimensionMismatch {
            expected: log.len(),
            found: regret.len(),
        });
    }
    let dim = log.first().map_or(0, |r| r.arm.dim());
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["t".to_string(), "h".into(), "i".into()];
    header.extend((0..dim).map(|k| format!("x{k}")));
    header.extend(["y".to_string(), "cum_pseudo_regret".into()]);
    w.write_record(&header).map_err(csv_error)?;
    for (record, value) in log.iter().zip(&regret.values) {
        let mut row = vec![
            record.round.to_string(),
            record.node.depth.to_string(),
            record.node.index.to_string(),
        ];
        row.extend(record.arm.coords().iter().map(f64::to_string));
        row.push(record.reward.to_string());
        row.push(value.to_string());
        w.write_record(&row).map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}
