//! Run configuration: built-in defaults, overridden by a TOML file, overridden
//! by command-line flags. The resolved value is written next to every run's
//! outputs.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use serde::{Deserialize, Serialize};

use plateau_core::limitproc::SmallJumps;
use plateau_core::DistSpec;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub workers: usize,
    pub simulate: SimulateConfig,
    pub sweep: SweepConfig,
    pub limit_sim: LimitSimConfig,
    pub limit_law: LimitLawConfig,
    pub compare: CompareConfig,
    pub verify: VerifyConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            seed: 1,
            workers: 1,
            simulate: SimulateConfig::default(),
            sweep: SweepConfig::default(),
            limit_sim: LimitSimConfig::default(),
            limit_law: LimitLawConfig::default(),
            compare: CompareConfig::default(),
            verify: VerifyConfig::default(),
        }
    }
}

/// Single tandem trajectory. Defaults: 1000 jobs, exponential interarrivals
/// with mean 3.1, Pareto(1, 1.5) services.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulateConfig {
    pub jobs: usize,
    pub arrival: DistSpec,
    pub service: DistSpec,
    /// Extra uniform time points merged into the continuous-time table.
    pub grid_points: usize,
}

impl Default for SimulateConfig {
    fn default() -> Self {
        Self {
            jobs: 1000,
            arrival: DistSpec::Exponential { rate: 1.0 / 3.1 },
            service: DistSpec::Pareto {
                scale: 1.0,
                index: 1.5,
            },
            grid_points: 0,
        }
    }
}

/// Heavy-traffic sweep of `M̌^r` over a list of `r`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub alpha: f64,
    pub gamma: f64,
    pub arrival: DistSpec,
    pub service: DistSpec,
    pub levels: Vec<f64>,
    pub replications: usize,
    pub horizon: f64,
    /// Time at which `M̌^r` is summarized.
    pub at: f64,
    /// Write one path CSV per (r, replication).
    pub write_paths: bool,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            alpha: 1.5,
            gamma: 1.0,
            arrival: DistSpec::Exponential { rate: 1.0 },
            service: DistSpec::Pareto {
                scale: 1.0,
                index: 1.5,
            },
            levels: vec![1e2, 1e3, 1e4],
            replications: 200,
            horizon: 1.0,
            at: 1.0,
            write_paths: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SmallJumpMode {
    Drop,
    VarianceMatched,
}

impl From<SmallJumpMode> for SmallJumps {
    fn from(m: SmallJumpMode) -> Self {
        match m {
            SmallJumpMode::Drop => SmallJumps::Drop,
            SmallJumpMode::VarianceMatched => SmallJumps::VarianceMatched,
        }
    }
}

/// Stored limit-process paths with full exports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LimitSimConfig {
    pub alpha: f64,
    pub eps: f64,
    pub small_jumps: SmallJumpMode,
    pub horizon: f64,
    pub paths: usize,
    pub levels: Vec<f64>,
}

impl Default for LimitSimConfig {
    fn default() -> Self {
        Self {
            alpha: 1.5,
            eps: 1e-3,
            small_jumps: SmallJumpMode::VarianceMatched,
            horizon: 5.0,
            paths: 1,
            levels: vec![0.5, 1.0, 2.0],
        }
    }
}

/// Tables of `κ`, `h` and `F_v`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LimitLawConfig {
    pub alpha: f64,
    /// `lo:hi:n`, logarithmically spaced.
    pub q_grid: String,
    pub levels: Vec<f64>,
    /// `lo:hi:n`, evenly spaced.
    pub y_grid: String,
    pub root_tol: f64,
}

impl Default for LimitLawConfig {
    fn default() -> Self {
        Self {
            alpha: 1.5,
            q_grid: "1e-3:1e4:71".into(),
            levels: vec![0.5, 1.0, 2.0],
            y_grid: "0:5:101".into(),
            root_tol: 1e-12,
        }
    }
}

/// Empirical `Z(v)` against `F_v`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CompareConfig {
    pub alpha: f64,
    pub eps: f64,
    pub small_jumps: SmallJumpMode,
    pub levels: Vec<f64>,
    pub paths: usize,
    /// Longest stretch of time a path may run to reach the largest level.
    pub max_horizon: f64,
    pub threshold: f64,
    /// Below this many samples the report flags the KS distance as unreliable.
    pub min_reliable: usize,
    /// Read `Z` samples from a CSV (`path_id,v,Z`) instead of simulating.
    pub samples: Option<PathBuf>,
}

impl Default for CompareConfig {
    fn default() -> Self {
        Self {
            alpha: 1.5,
            eps: 1e-4,
            small_jumps: SmallJumpMode::VarianceMatched,
            levels: vec![1.0],
            paths: 5000,
            max_horizon: 1e4,
            threshold: 0.05,
            min_reliable: 100,
            samples: None,
        }
    }
}

#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize, clap::ValueEnum,
)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Counterexample,
    Idleness,
    Sojourn,
    TransferCount,
    Hscale,
}

impl Suite {
    pub const ALL: [Suite; 5] = [
        Suite::Counterexample,
        Suite::Idleness,
        Suite::Sojourn,
        Suite::TransferCount,
        Suite::Hscale,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Counterexample => "counterexample",
            Suite::Idleness => "idleness",
            Suite::Sojourn => "sojourn",
            Suite::TransferCount => "transfer-count",
            Suite::Hscale => "hscale",
        }
    }
}

/// Identity checks on random instances.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifyConfig {
    pub suites: Vec<Suite>,
    pub instances: usize,
    pub jobs: usize,
    pub arrival: DistSpec,
    pub service: DistSpec,
    pub queries: usize,
    pub tuples: usize,
    pub tol: f64,
    /// Suite whose second route gets a sign flipped, to exercise the harness.
    pub corrupt: Option<Suite>,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            suites: Suite::ALL.to_vec(),
            instances: 10,
            jobs: 10_000,
            arrival: DistSpec::Exponential { rate: 1.0 / 3.1 },
            service: DistSpec::Pareto {
                scale: 1.0,
                index: 1.5,
            },
            queries: 1000,
            tuples: 1000,
            tol: 1e-9,
            corrupt: None,
        }
    }
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
    }

    pub fn to_toml(&self) -> anyhow::Result<String> {
        toml::to_string(self).context("serializing config")
    }
}

/// `lo:hi:n` grid. Logarithmic spacing needs `lo > 0`.
pub fn parse_grid(spec: &str, log: bool) -> anyhow::Result<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').collect();
    let [lo, hi, n] = parts[..] else {
        bail!("grid {spec:?} is not of the form lo:hi:n");
    };
    let lo: f64 = lo
        .trim()
        .parse()
        .with_context(|| format!("grid {spec:?}: bad lower end"))?;
    let hi: f64 = hi
        .trim()
        .parse()
        .with_context(|| format!("grid {spec:?}: bad upper end"))?;
    let n: usize = n
        .trim()
        .parse()
        .with_context(|| format!("grid {spec:?}: bad point count"))?;
    if !(lo.is_finite() && hi.is_finite() && lo <= hi) || n == 0 {
        bail!("grid {spec:?} needs finite lo <= hi and at least one point");
    }
    if log && lo <= 0.0 {
        bail!("logarithmic grid {spec:?} needs a positive lower end");
    }
    if n == 1 {
        return Ok(vec![lo]);
    }
    Ok((0..n)
        .map(|k| {
            let f = k as f64 / (n - 1) as f64;
            if k == n - 1 {
                hi
            } else if log {
                10f64.powf(lo.log10() + f * (hi.log10() - lo.log10()))
            } else {
                lo + f * (hi - lo)
            }
        })
        .collect())
}
