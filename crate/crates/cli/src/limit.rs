use std::collections::BTreeMap;

use anyhow::{bail, Context};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use plateau_core::limitlaw::{c_alpha, LimitLaw, LimitLawParams};
use plateau_core::limitproc::{sample_z, simulate_x, write_excursions_csv, LimitSpec};
use plateau_core::stats::{ks_critical, EmpiricalSample};
use plateau_core::{Error, SeededStream};

use crate::config::{parse_grid, ExperimentConfig};
use crate::output::{Report, RunDir};
use crate::Status;

/// Stream root shared by `limit-sim` and `compare`, so that path `i` is the
/// same path in both.
const PATH_STREAM: &str = "limit/path";

fn check_levels(levels: &[f64]) -> anyhow::Result<()> {
    if levels.iter().any(|v| !(*v >= 0.0 && v.is_finite())) {
        bail!("levels must be finite and nonnegative: {levels:?}");
    }
    if levels.windows(2).any(|w| w[0] >= w[1]) {
        bail!("levels must be strictly increasing: {levels:?}");
    }
    Ok(())
}

/// Rows `path_id,v,Z`; levels a path did not reach are left out.
fn write_z_samples(out: &RunDir, levels: &[f64], z: &[Vec<Option<f64>>]) -> anyhow::Result<()> {
    let mut w = csv::Writer::from_writer(out.file("z_samples.csv")?);
    w.write_record(["path_id", "v", "Z"])?;
    for (i, row) in z.iter().enumerate() {
        for (v, zv) in levels.iter().zip(row) {
            if let Some(zv) = zv {
                w.write_record([i.to_string(), format!("{v:?}"), format!("{zv:?}")])?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct PathSummary {
    path_id: usize,
    jumps: usize,
    local_time_at_horizon: f64,
    complete_excursions: usize,
    /// Excursion still open at the horizon; excluded from excursion statistics.
    open_at_horizon: bool,
    largest_complete_jump: f64,
    /// `Z(v)` per level; `None` where `L(horizon) ≤ v`.
    z: Vec<Option<f64>>,
}

pub fn run_sim(cfg: &ExperimentConfig, out: &RunDir) -> anyhow::Result<Status> {
    let c = &cfg.limit_sim;
    check_levels(&c.levels)?;
    let spec = LimitSpec::new(c.alpha, c.eps, c.small_jumps.into())?;
    let root = SeededStream::new(cfg.seed, PATH_STREAM);
    let summaries: Vec<PathSummary> = (0..c.paths)
        .into_par_iter()
        .map(|i| -> anyhow::Result<PathSummary> {
            let path = simulate_x(&spec, c.horizon, &root.child(i))?;
            path.write_csv(out.file(&format!("paths/path{i:05}.csv"))?)?;
            let exc = path.excursions();
            write_excursions_csv(&exc, out.file(&format!("excursions/path{i:05}.csv"))?)?;
            let z = c
                .levels
                .iter()
                .map(|v| match path.z(*v) {
                    Ok(z) => Ok(Some(z)),
                    Err(Error::HorizonExceeded { .. }) => Ok(None),
                    Err(e) => Err(e),
                })
                .collect::<Result<Vec<_>, _>>()
                .with_context(|| format!("path {i}"))?;
            let complete: Vec<_> = exc.iter().filter(|e| e.complete).collect();
            Ok(PathSummary {
                path_id: i,
                jumps: path.jump_times().len(),
                local_time_at_horizon: path.local_time(c.horizon),
                complete_excursions: complete.len(),
                open_at_horizon: exc.last().is_some_and(|e| !e.complete),
                largest_complete_jump: complete.iter().map(|e| e.max_jump).fold(0.0, f64::max),
                z,
            })
        })
        .collect::<anyhow::Result<_>>()?;
    let z: Vec<Vec<Option<f64>>> = summaries.iter().map(|s| s.z.clone()).collect();
    write_z_samples(out, &c.levels, &z)?;
    let short = summaries
        .iter()
        .filter(|s| s.z.iter().any(Option::is_none))
        .count();
    if short > 0 {
        let lowest = summaries
            .iter()
            .map(|s| s.local_time_at_horizon)
            .fold(f64::INFINITY, f64::min);
        let top = c.levels.last().copied().unwrap_or(0.0);
        eprintln!(
            "warning: {short} of {} paths did not reach local time {top} by the horizon {}; \
             Z is omitted there (try a horizon of at least {:.3})",
            c.paths,
            c.horizon,
            c.horizon * (2.0 * top / lowest.max(f64::MIN_POSITIVE)).max(2.0)
        );
    }

    #[derive(Serialize)]
    struct SimSummary {
        slope: f64,
        jump_rate: f64,
        paths: Vec<PathSummary>,
    }
    out.write_json(
        "report.json",
        &Report {
            command: "limit-sim",
            passed: true,
            config: cfg,
            results: SimSummary {
                slope: spec.slope(),
                jump_rate: spec.jump_rate(),
                paths: summaries,
            },
        },
    )?;
    Ok(Status::Pass)
}

pub fn run_law(cfg: &ExperimentConfig, out: &RunDir) -> anyhow::Result<Status> {
    let c = &cfg.limit_law;
    let mut levels = c.levels.clone();
    levels.sort_by(f64::total_cmp);
    check_levels(&levels)?;
    let qs = parse_grid(&c.q_grid, true)?;
    let ys = parse_grid(&c.y_grid, false)?;
    if ys[0] < 0.0 {
        bail!("y grid must be nonnegative");
    }
    let params = LimitLawParams::new(c.alpha)?;
    let params = params.with_tolerances(c.root_tol, params.quad_tol)?;

    let kappas: Vec<f64> = qs
        .par_iter()
        .map(|q| params.kappa(*q))
        .collect::<Result<_, _>>()?;
    let mut w = csv::Writer::from_writer(out.file("kappa.csv")?);
    w.write_record(["q", "kappa", "h"])?;
    let mut worst_residual: f64 = 0.0;
    for (q, k) in qs.iter().zip(&kappas) {
        worst_residual = worst_residual.max(params.kappa_residual(*q, *k).abs());
        w.write_record([format!("{q:?}"), format!("{k:?}"), format!("{:?}", k / q)])?;
    }
    w.flush()?;

    let law = LimitLaw::new(params)?;
    let mut w = csv::Writer::from_writer(out.file("law.csv")?);
    w.write_record(["v", "y", "lambda", "F"])?;
    for v in &levels {
        for y in &ys {
            let lambda = if *y > 0.0 {
                law.lambda(*v, *y)?
            } else if *v > 0.0 {
                f64::INFINITY
            } else {
                0.0
            };
            let f = law.cdf(*v, *y)?;
            w.write_record([
                format!("{v:?}"),
                format!("{y:?}"),
                format!("{lambda:?}"),
                format!("{f:?}"),
            ])?;
        }
    }
    w.flush()?;

    #[derive(Serialize)]
    struct LawSummary {
        c_alpha: f64,
        kappa_zero: f64,
        max_residual: f64,
        q_points: usize,
        y_points: usize,
    }
    out.write_json(
        "report.json",
        &Report {
            command: "limit-law",
            passed: true,
            config: cfg,
            results: LawSummary {
                c_alpha: c_alpha(c.alpha)?,
                kappa_zero: params.kappa_zero()?,
                max_residual: worst_residual,
                q_points: qs.len(),
                y_points: ys.len(),
            },
        },
    )?;
    Ok(Status::Pass)
}

#[derive(Deserialize)]
struct SampleRow {
    #[allow(dead_code)]
    path_id: usize,
    v: f64,
    #[serde(rename = "Z")]
    z: f64,
}

/// Samples grouped by level, in increasing order of `v`.
fn read_samples(path: &std::path::Path) -> anyhow::Result<Vec<(f64, Vec<f64>)>> {
    let mut r =
        csv::Reader::from_path(path).with_context(|| format!("opening {}", path.display()))?;
    let mut groups: BTreeMap<u64, Vec<f64>> = BTreeMap::new();
    for (line, row) in r.deserialize::<SampleRow>().enumerate() {
        let row = row.with_context(|| format!("{} record {}", path.display(), line + 1))?;
        if !(row.v >= 0.0 && row.z.is_finite()) {
            bail!(
                "{} record {}: bad level or sample",
                path.display(),
                line + 1
            );
        }
        // Nonnegative floats order like their bit patterns.
        groups.entry(row.v.to_bits()).or_default().push(row.z);
    }
    if groups.is_empty() {
        bail!("{} holds no samples", path.display());
    }
    Ok(groups
        .into_iter()
        .map(|(bits, z)| (f64::from_bits(bits), z))
        .collect())
}

#[derive(Serialize)]
struct LevelResult {
    v: f64,
    n: usize,
    ks: f64,
    /// Asymptotic 95% KS quantile for this sample size.
    ks_critical_95: f64,
    passed: bool,
    reliable: bool,
}

pub fn run_compare(cfg: &ExperimentConfig, out: &RunDir) -> anyhow::Result<Status> {
    let c = &cfg.compare;
    let groups = match &c.samples {
        Some(path) => read_samples(path)?,
        None => {
            check_levels(&c.levels)?;
            if c.paths == 0 {
                bail!("compare needs at least one path");
            }
            let spec = LimitSpec::new(c.alpha, c.eps, c.small_jumps.into())?;
            let root = SeededStream::new(cfg.seed, PATH_STREAM);
            let z: Vec<Vec<Option<f64>>> = (0..c.paths)
                .into_par_iter()
                .map(|i| {
                    let z = sample_z(&spec, &c.levels, &root.child(i), c.max_horizon)
                        .with_context(|| format!("path {i}"))?;
                    Ok(z.into_iter().map(Some).collect())
                })
                .collect::<anyhow::Result<_>>()?;
            write_z_samples(out, &c.levels, &z)?;
            c.levels
                .iter()
                .enumerate()
                .map(|(j, v)| (*v, z.iter().filter_map(|row| row[j]).collect()))
                .collect()
        }
    };

    let law = LimitLaw::for_alpha(c.alpha)?;
    let mut table = csv::Writer::from_writer(out.file("cdf.csv")?);
    table.write_record(["v", "y", "ecdf", "F"])?;
    let mut results = Vec::new();
    let mut warnings = Vec::new();
    for (v, z) in groups {
        let sample = EmpiricalSample::new(z)?;
        let ks = sample.ks_distance(|y| law.cdf(v, y).unwrap_or(f64::NAN));
        if ks.is_nan() {
            bail!("limit law could not be evaluated at v = {v}");
        }
        let mut last = f64::NAN;
        for y in sample.sorted() {
            if *y != last {
                table.write_record([
                    format!("{v:?}"),
                    format!("{y:?}"),
                    format!("{:?}", sample.ecdf(*y)),
                    format!("{:?}", law.cdf(v, *y)?),
                ])?;
                last = *y;
            }
        }
        let reliable = sample.len() >= c.min_reliable;
        if !reliable {
            warnings.push(format!(
                "v = {v}: {} samples is below the reliability threshold of {}",
                sample.len(),
                c.min_reliable
            ));
        }
        results.push(LevelResult {
            v,
            n: sample.len(),
            ks,
            ks_critical_95: ks_critical(sample.len(), 0.05),
            passed: ks <= c.threshold,
            reliable,
        });
    }
    table.flush()?;

    for r in &results {
        println!(
            "v={:<6} n={:<6} KS={:.4} threshold={} {}",
            r.v,
            r.n,
            r.ks,
            c.threshold,
            if r.passed { "PASS" } else { "FAIL" }
        );
    }
    for w in &warnings {
        eprintln!("warning: {w}");
    }
    let passed = results.iter().all(|r| r.passed);

    #[derive(Serialize)]
    struct CompareSummary {
        threshold: f64,
        levels: Vec<LevelResult>,
        warnings: Vec<String>,
    }
    out.write_json(
        "report.json",
        &Report {
            command: "compare",
            passed,
            config: cfg,
            results: CompareSummary {
                threshold: c.threshold,
                levels: results,
                warnings,
            },
        },
    )?;
    Ok(if passed {
        Status::Pass
    } else {
        Status::AcceptanceFailure
    })
}
