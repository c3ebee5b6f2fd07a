//! `plateau`: simulations of the two-station tandem queue with reused service
//! times, heavy-traffic sweeps, the stable limit process and its plateau law.

// `!(x > 0.0)` is used on purpose so NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod config;
mod limit;
mod output;
mod simulate;
mod sweep;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{CommandFactory, FromArgMatches, Parser, Subcommand};

use config::{ExperimentConfig, Suite};
use output::RunDir;

/// Outcome of a subcommand that ran to completion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    AcceptanceFailure,
}

#[derive(Parser, Debug)]
#[command(
    name = "plateau",
    version,
    about = "Tandem queue plateau simulations and limit-law checks"
)]
struct Cli {
    /// TOML configuration file; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Master seed for every random stream.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for independent replications (0: all cores).
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Output directory [default: runs/<command>].
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    /// Stable index α in (1, 2).
    #[arg(long, global = true)]
    alpha: Option<f64>,
    /// Heavy-traffic parameter γ.
    #[arg(long, global = true)]
    gamma: Option<f64>,
    /// Jump truncation level ε of the limit process.
    #[arg(long, global = true)]
    eps: Option<f64>,
    /// Number of paths or replications.
    #[arg(long, global = true)]
    paths: Option<usize>,
    /// Tolerance for identity checks and root solves.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// KS threshold for `compare`.
    #[arg(long, global = true)]
    threshold: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// One tandem trajectory: per-job table, W1/W2/M on the event grid.
    Simulate {
        /// Number of jobs.
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Scaled plateau process across heavy-traffic levels r.
    ScaleSweep {
        /// Comma-separated list of r.
        #[arg(long, value_delimiter = ',')]
        levels: Option<Vec<f64>>,
    },
    /// Stored limit-process paths with reflection, excursions and Z(v).
    LimitSim {
        /// Comma-separated local-time levels v.
        #[arg(long, value_delimiter = ',')]
        v: Option<Vec<f64>>,
        /// Time horizon of each path.
        #[arg(long)]
        horizon: Option<f64>,
    },
    /// Tables of κ(q), h(q) and F_v(y).
    LimitLaw {
        /// `lo:hi:n`, logarithmic.
        #[arg(long)]
        q_grid: Option<String>,
        /// Comma-separated levels v.
        #[arg(long, value_delimiter = ',')]
        v: Option<Vec<f64>>,
        /// `lo:hi:n`, linear.
        #[arg(long)]
        y_grid: Option<String>,
    },
    /// KS distance between simulated (or supplied) Z(v) and F_v.
    Compare {
        /// Comma-separated levels v.
        #[arg(long, value_delimiter = ',')]
        v: Option<Vec<f64>>,
        /// Z-sample CSV (`path_id,v,Z`) to test instead of simulating.
        #[arg(long)]
        samples: Option<PathBuf>,
    },
    /// Identity suites: idleness, sojourn, transfer counts, scaling, counterexample.
    Verify {
        /// Suites to run (repeatable); `--suite none` runs nothing.
        #[arg(long = "suite", value_delimiter = ',')]
        suites: Option<Vec<SuiteArg>>,
        /// Flip a sign in one route of the named suite [default: idleness].
        #[arg(long, num_args = 0..=1, default_missing_value = "idleness")]
        corrupt: Option<Suite>,
        /// Random instances per suite.
        #[arg(long)]
        instances: Option<usize>,
    },
}

#[derive(Debug, Clone, Copy, clap::ValueEnum)]
enum SuiteArg {
    None,
    Counterexample,
    Idleness,
    Sojourn,
    TransferCount,
    Hscale,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Simulate { .. } => "simulate",
            Command::ScaleSweep { .. } => "scale-sweep",
            Command::LimitSim { .. } => "limit-sim",
            Command::LimitLaw { .. } => "limit-law",
            Command::Compare { .. } => "compare",
            Command::Verify { .. } => "verify",
        }
    }
}

fn resolve(cli: &Cli) -> anyhow::Result<ExperimentConfig> {
    let mut cfg = match &cli.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(w) = cli.workers {
        cfg.workers = w;
    }
    match &cli.command {
        Command::Simulate { jobs } => {
            if let Some(n) = jobs.or(cli.paths) {
                cfg.simulate.jobs = n;
            }
        }
        Command::ScaleSweep { levels } => {
            let s = &mut cfg.sweep;
            set(&mut s.alpha, cli.alpha);
            set(&mut s.gamma, cli.gamma);
            set(&mut s.replications, cli.paths);
            if let Some(l) = levels {
                s.levels = l.clone();
            }
        }
        Command::LimitSim { v, horizon } => {
            let s = &mut cfg.limit_sim;
            set(&mut s.alpha, cli.alpha);
            set(&mut s.eps, cli.eps);
            set(&mut s.paths, cli.paths);
            set(&mut s.horizon, *horizon);
            if let Some(v) = v {
                s.levels = v.clone();
            }
        }
        Command::LimitLaw { q_grid, v, y_grid } => {
            let s = &mut cfg.limit_law;
            set(&mut s.alpha, cli.alpha);
            set(&mut s.root_tol, cli.tol);
            if let Some(g) = q_grid {
                s.q_grid = g.clone();
            }
            if let Some(g) = y_grid {
                s.y_grid = g.clone();
            }
            if let Some(v) = v {
                s.levels = v.clone();
            }
        }
        Command::Compare { v, samples } => {
            let s = &mut cfg.compare;
            set(&mut s.alpha, cli.alpha);
            set(&mut s.eps, cli.eps);
            set(&mut s.paths, cli.paths);
            set(&mut s.threshold, cli.threshold);
            if let Some(v) = v {
                s.levels = v.clone();
            }
            if samples.is_some() {
                s.samples = samples.clone();
            }
        }
        Command::Verify {
            suites,
            corrupt,
            instances,
        } => {
            let s = &mut cfg.verify;
            set(&mut s.tol, cli.tol);
            set(&mut s.instances, *instances);
            if corrupt.is_some() {
                s.corrupt = *corrupt;
            }
            if let Some(list) = suites {
                s.suites = list
                    .iter()
                    .filter_map(|a| match a {
                        SuiteArg::None => None,
                        SuiteArg::Counterexample => Some(Suite::Counterexample),
                        SuiteArg::Idleness => Some(Suite::Idleness),
                        SuiteArg::Sojourn => Some(Suite::Sojourn),
                        SuiteArg::TransferCount => Some(Suite::TransferCount),
                        SuiteArg::Hscale => Some(Suite::Hscale),
                    })
                    .collect();
                s.suites.sort();
                s.suites.dedup();
            }
        }
    }
    Ok(cfg)
}

fn set<T>(slot: &mut T, value: Option<T>) {
    if let Some(v) = value {
        *slot = v;
    }
}

fn run(cli: Cli) -> anyhow::Result<Status> {
    let cfg = resolve(&cli)?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build_global()
        .context("starting worker pool")?;
    let name = cli.command.name();
    let dir = cli
        .out_dir
        .clone()
        .unwrap_or_else(|| PathBuf::from("runs").join(name));
    let out = RunDir::create(&dir)?;
    out.write_config(&cfg)?;
    let status = match cli.command {
        Command::Simulate { .. } => simulate::run(&cfg, &out)?,
        Command::ScaleSweep { .. } => sweep::run(&cfg, &out)?,
        Command::LimitSim { .. } => limit::run_sim(&cfg, &out)?,
        Command::LimitLaw { .. } => limit::run_law(&cfg, &out)?,
        Command::Compare { .. } => limit::run_compare(&cfg, &out)?,
        Command::Verify { .. } => verify::run(&cfg, &out)?,
    };
    eprintln!("{name}: outputs in {}", dir.display());
    Ok(status)
}

fn main() -> ExitCode {
    let defaults = ExperimentConfig::default().to_toml().unwrap_or_default();
    let command = Cli::command().after_long_help(format!(
        "Exit status: 0 pass, 1 invalid input or I/O error, 2 acceptance failure.\n\n\
         Default configuration (override with --config FILE, then flags):\n\n{defaults}"
    ));
    let parsed = command
        .try_get_matches()
        .and_then(|m| Cli::from_arg_matches(&m));
    let cli = match parsed {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    ExitCode::SUCCESS
                }
                _ => ExitCode::from(1),
            };
        }
    };
    match run(cli) {
        Ok(Status::Pass) => ExitCode::SUCCESS,
        Ok(Status::AcceptanceFailure) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
