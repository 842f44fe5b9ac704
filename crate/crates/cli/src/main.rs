use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use hoo_core::env::EnvNorm;
use hoo_core::harness::{run_experiment, run_single, write_bundle, write_play_trace_csv, ExperimentConfig};
use hoo_core::{Dissimilarity, EnvSpec, Error, Norm, StrategyKind};
use serde_json::json;

/// Run HOO experiments on the built-in environments.
#[derive(Parser, Debug)]
#[command(name = "hoo", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run replicated experiments and write regret.csv and summary.json.
    Run(ExperimentArgs),
    /// Run one replication and write its per-round trace and tree snapshots.
    Trace {
        #[command(flatten)]
        experiment: ExperimentArgs,
        /// Replication index (selects the random stream).
        #[arg(long, default_value_t = 0)]
        replication: u64,
    },
    /// Print the configuration the flags describe, as JSON.
    Config(ExperimentArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum EnvArg {
    Garland,
    NormPow,
    Bump,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum StrategyArg {
    Basic,
    Truncated,
    Zhoo,
    Local,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum NormArg {
    Sup,
    Euclidean,
}

#[derive(Args, Debug)]
struct ExperimentArgs {
    /// Read the whole configuration from a JSON file; other flags are ignored.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "garland")]
    env: EnvArg,
    #[arg(long, value_enum, default_value = "basic")]
    strategy: StrategyArg,
    #[arg(long, default_value_t = 1.0)]
    nu1: f64,
    #[arg(long, default_value_t = 0.5)]
    rho: f64,
    /// Start depth for `--strategy zhoo`.
    #[arg(long)]
    z: Option<u32>,
    #[arg(long, default_value_t = 1000)]
    horizon: u64,
    #[arg(long, default_value_t = 1)]
    reps: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Comma-separated checkpoint rounds (default: the horizon).
    #[arg(long, value_delimiter = ',')]
    checkpoints: Vec<u64>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    /// Dimension of `norm-pow`.
    #[arg(long, default_value_t = 1)]
    dim: usize,
    /// Exponent `a` of `norm-pow` (f = 1 - ||x||^a).
    #[arg(long, default_value_t = 2.0)]
    exponent: f64,
    /// Norm of `norm-pow`; `euclidean` is divided by sqrt(D).
    #[arg(long, value_enum, default_value = "sup")]
    norm: NormArg,
    /// Comma-separated centre of `bump`.
    #[arg(long, value_delimiter = ',', default_value = "0.5")]
    center: Vec<f64>,
    /// Height of `bump` above 1/2.
    #[arg(long, default_value_t = 0.25)]
    eta: f64,
    /// Norm of the `bump` metric.
    #[arg(long, value_enum, default_value = "euclidean")]
    bump_norm: NormArg,
    /// Exponent of the `bump` metric (at most 1).
    #[arg(long, default_value_t = 1.0)]
    bump_exponent: f64,
}

impl ExperimentArgs {
    fn to_config(&self) -> Result<ExperimentConfig, Error> {
        if let Some(path) = &self.config {
            let text = fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
            return ExperimentConfig::from_json(&text);
        }
        let env = match self.env {
            EnvArg::Garland => EnvSpec::Garland,
            EnvArg::NormPow => EnvSpec::NormPow {
                dim: self.dim,
                exponent: self.exponent,
                norm: match self.norm {
                    NormArg::Sup => EnvNorm::Supremum,
                    NormArg::Euclidean => EnvNorm::NormalizedEuclidean,
                },
            },
            EnvArg::Bump => EnvSpec::Bump {
                center: self.center.clone(),
                eta: self.eta,
                dissimilarity: Dissimilarity::norm_power(
                    match self.bump_norm {
                        NormArg::Sup => Norm::Supremum,
                        NormArg::Euclidean => Norm::Euclidean,
                    },
                    self.bump_exponent,
                    1.0,
                )?,
            },
        };
        let strategy = match (self.strategy, self.z) {
            (StrategyArg::Zhoo, Some(z)) => StrategyKind::Zhoo { z },
            (StrategyArg::Zhoo, None) => return Err(Error::Config("--strategy zhoo needs --z".into())),
            (_, Some(_)) => return Err(Error::Config("--z applies only to --strategy zhoo".into())),
            (StrategyArg::Basic, None) => StrategyKind::Basic,
            (StrategyArg::Truncated, None) => StrategyKind::Truncated,
            (StrategyArg::Local, None) => StrategyKind::Local,
        };
        let mut config = ExperimentConfig::new(env, strategy, self.nu1, self.rho, self.horizon, self.reps);
        config.master_seed = self.seed;
        if !self.checkpoints.is_empty() {
            config.checkpoints = self.checkpoints.clone();
        }
        config.output = self.out.clone();
        config.workers = self.workers;
        Ok(config)
    }
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::InvalidParameter { .. } => "invalid_parameter",
        Error::DimensionMismatch { .. } => "dimension_mismatch",
        Error::NodeOutOfRange { .. } => "node_out_of_range",
        Error::UnsupportedDissimilarity(_) => "unsupported_dissimilarity",
        Error::Empty(_) => "empty",
        Error::Degenerate(_) => "degenerate",
        Error::Config(_) => "config",
        Error::Io(_) => "io",
    }
}

/// Builds and validates the configuration, reporting problems on stderr as
/// one JSON object.
fn checked_config(args: &ExperimentArgs) -> Result<ExperimentConfig, ExitCode> {
    let config = args.to_config().and_then(|c| c.validate().map(|_| c));
    config.map_err(|e| {
        let mut diag = json!({ "error": error_kind(&e), "message": e.to_string() });
        if let Error::InvalidParameter { name, .. } = &e {
            diag["parameter"] = json!(name);
        }
        eprintln!("{diag}");
        ExitCode::from(2)
    })
}

fn run(config: &ExperimentConfig) -> anyhow::Result<()> {
    let bundle = run_experiment(config)?;
    let mut stdout = io::stdout().lock();
    writeln!(stdout, "round\tmean_regret\tstderr\tmean_regret_per_round")?;
    for c in &bundle.summary.checkpoints {
        writeln!(
            stdout,
            "{}\t{:.4}\t{:.4}\t{:.6}",
            c.round, c.mean, c.stderr, c.mean_per_round
        )?;
    }
    match (&bundle.summary.slope, bundle.summary.point_slope) {
        (Some(fit), _) => writeln!(
            stdout,
            "slope {:.4} (95% CI {:.4} .. {:.4})",
            fit.slope, fit.ci_low, fit.ci_high
        )?,
        (None, Some(s)) => writeln!(stdout, "slope {s:.4}")?,
        _ => {}
    }
    if let Some(dir) = &config.output {
        let (csv, json) = write_bundle(&bundle, dir).with_context(|| format!("writing {}", dir.display()))?;
        writeln!(stdout, "wrote {} and {}", csv.display(), json.display())?;
    }
    Ok(())
}

fn trace(config: &ExperimentConfig, replication: u64) -> anyhow::Result<()> {
    let single = run_single(config, replication)?;
    let dir = config.output.clone().unwrap_or_else(|| PathBuf::from("."));
    fs::create_dir_all(&dir)?;
    let path = dir.join(format!("trace_{replication}.csv"));
    write_play_trace_csv(&single.log, &single.regret, fs::File::create(&path)?)?;
    println!("wrote {}", path.display());
    for snap in &single.snapshots {
        let stem = dir.join(format!("tree_{replication}_{}", snap.round));
        fs::write(stem.with_extension("json"), snap.to_json())?;
        fs::write(stem.with_extension("txt"), snap.to_text())?;
        println!("wrote {}.{{json,txt}} ({} nodes)", stem.display(), snap.nodes.len());
    }
    println!("cumulative pseudo-regret {:.4}", single.regret.final_value());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (args, replication) = match &cli.command {
        Command::Run(a) | Command::Config(a) => (a, 0),
        Command::Trace {
            experiment,
            replication,
        } => (experiment, *replication),
    };
    let config = match checked_config(args) {
        Ok(c) => c,
        Err(code) => return code,
    };
    let result = match cli.command {
        Command::Run(_) => run(&config),
        Command::Trace { .. } => trace(&config, replication),
        Command::Config(_) => config.to_json().map(|t| println!("{t}")).map_err(Into::into),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", json!({ "error": "runtime", "message": format!("{e:#}") }));
            ExitCode::FAILURE
        }
    }
}
