use anyhow::{bail, Context};
use rayon::prelude::*;
use serde::Serialize;

use plateau_core::scaling::{default_budget, scaled_plateau, HeavyTrafficFamily};
use plateau_core::stats::EmpiricalSample;
use plateau_core::SeededStream;

use crate::config::ExperimentConfig;
use crate::output::{Report, RunDir};
use crate::Status;

const PROBS: [f64; 5] = [0.1, 0.25, 0.5, 0.75, 0.9];

#[derive(Serialize)]
struct LevelSummary {
    r: f64,
    a_r: f64,
    mu: f64,
    rho: f64,
    replications: usize,
    mean: f64,
    /// `(p, quantile)` pairs of `M̌^r(at)`.
    quantiles: Vec<(f64, f64)>,
    /// Two-sample KS distance to the previous level.
    ks_to_previous: Option<f64>,
}

#[derive(Serialize)]
struct SweepSummary {
    at: f64,
    levels: Vec<LevelSummary>,
    /// Whether KS distances between successive levels strictly decrease.
    ks_decreasing: bool,
}

fn level_tag(r: f64) -> String {
    format!("{r:e}").replace('.', "_")
}

pub fn run(cfg: &ExperimentConfig, out: &RunDir) -> anyhow::Result<Status> {
    let c = &cfg.sweep;
    if !(c.horizon > 0.0) || !(0.0..=c.horizon).contains(&c.at) {
        bail!("sweep needs horizon > 0 and 0 <= at <= horizon");
    }
    if c.replications == 0 || c.levels.is_empty() {
        bail!("sweep needs at least one level and one replication");
    }
    if let Some(index) = c.service.tail_index() {
        if index != c.alpha {
            bail!(
                "service tail index {index} does not match the norming exponent alpha = {}",
                c.alpha
            );
        }
    }
    let family = HeavyTrafficFamily::new(
        c.alpha,
        c.gamma,
        c.arrival.validated()?,
        c.service.validated()?,
    )?;

    let mut samples_csv = csv::Writer::from_writer(out.file("samples.csv")?);
    samples_csv.write_record(["r", "replication", "M"])?;
    let mut levels = Vec::new();
    let mut previous: Option<EmpiricalSample> = None;
    for &r in &c.levels {
        let model = family.model(r)?;
        let budget = default_budget(&model, r * c.horizon);
        let root = SeededStream::new(cfg.seed, format!("sweep/{r:e}"));
        let tag = level_tag(r);
        let values: Vec<f64> = (0..c.replications)
            .into_par_iter()
            .map(|i| -> anyhow::Result<f64> {
                let path = scaled_plateau(&model, c.alpha, r, c.horizon, budget, &root.child(i))?;
                if c.write_paths {
                    path.write_csv(out.file(&format!("paths/r{tag}/rep{i:05}.csv"))?)?;
                }
                Ok(path.eval(c.at)?)
            })
            .collect::<anyhow::Result<_>>()
            .with_context(|| format!("level r = {r}"))?;
        for (i, m) in values.iter().enumerate() {
            samples_csv.write_record([format!("{r:?}"), i.to_string(), format!("{m:?}")])?;
        }
        let sample = EmpiricalSample::new(values)?;
        let quantiles = PROBS
            .iter()
            .map(|p| Ok((*p, sample.quantile(*p)?)))
            .collect::<anyhow::Result<_>>()?;
        levels.push(LevelSummary {
            r,
            a_r: family.a(r),
            mu: family.mu(r)?,
            rho: family.rho(r)?,
            replications: sample.len(),
            mean: sample.mean(),
            quantiles,
            ks_to_previous: previous.as_ref().map(|p| p.ks_two_sample(&sample)),
        });
        previous = Some(sample);
    }
    samples_csv.flush()?;

    let ks: Vec<f64> = levels.iter().filter_map(|l| l.ks_to_previous).collect();
    let summary = SweepSummary {
        at: c.at,
        ks_decreasing: ks.windows(2).all(|w| w[1] < w[0]),
        levels,
    };
    out.write_json(
        "report.json",
        &Report {
            command: "scale-sweep",
            passed: true,
            config: cfg,
            results: summary,
        },
    )?;
    Ok(Status::Pass)
}
