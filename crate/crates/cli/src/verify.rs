use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use plateau_core::paths::{idle_h, plateau_f, sup_distance};
use plateau_core::scaling::QueueModel;
use plateau_core::tandem::count_up_to;
use plateau_core::{SeededStream, StepPath, TandemTrajectory};

use crate::config::{ExperimentConfig, Suite, VerifyConfig};
use crate::output::{Report, RunDir};
use crate::Status;

#[derive(Serialize)]
struct SuiteResult {
    suite: &'static str,
    max_deviation: f64,
    tolerance: f64,
    passed: bool,
    detail: String,
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

fn negate(xs: &mut [f64]) {
    xs.iter_mut().for_each(|x| *x = -*x);
}

fn instances(c: &VerifyConfig, seed: u64, suite: Suite) -> anyhow::Result<Vec<TandemTrajectory>> {
    let model = QueueModel::new(c.arrival.validated()?, c.service.validated()?);
    let root = SeededStream::new(seed, format!("verify/{}", suite.name()));
    (0..c.instances)
        .into_par_iter()
        .map(|i| {
            Ok(TandemTrajectory::build(
                model.inputs_for_jobs(c.jobs, &root.child(i))?,
            ))
        })
        .collect()
}

fn counterexample(corrupt: bool) -> anyhow::Result<(f64, String)> {
    let x = StepPath::indicator(1.0)?.add(&StepPath::indicator(2.0)?);
    let y = StepPath::indicator(1.0)?;
    let f = plateau_f(&x, &y, 0.0).canonical();
    let sign = if corrupt { -1.0 } else { 1.0 };
    let expected = StepPath::new(0.0, vec![1.0, 2.0], vec![sign, 0.0])?;
    let dev = if f == expected {
        0.0
    } else {
        sup_distance(&f, &expected, 0.0).max(f64::MIN_POSITIVE)
    };
    Ok((
        dev,
        "F(1[1,inf) + 1[2,inf), 1[1,inf), 0) against 1[1,2)".into(),
    ))
}

fn idleness(trajs: &[TandemTrajectory], corrupt: bool) -> (f64, String) {
    let dev = trajs
        .par_iter()
        .map(|t| {
            let mut closed = t.inputs().idleness_closed_form_all();
            if corrupt {
                negate(&mut closed);
            }
            let via_h = t.inputs().idleness_via_h_all();
            let event: Vec<f64> = t.cum_u().iter().map(|s| t.idleness_at(*s)).collect();
            max_abs_diff(&closed, &via_h)
                .max(max_abs_diff(&closed, &event))
                .max(max_abs_diff(&via_h, &event))
        })
        .reduce(|| 0.0, f64::max);
    (
        dev,
        "closed form, H(U,V,1)(n) and event simulation of I_n".into(),
    )
}

fn sojourn(trajs: &[TandemTrajectory], corrupt: bool) -> (f64, String) {
    let dev = trajs
        .par_iter()
        .map(|t| {
            let lindley = t.inputs().sojourn_lindley();
            let mut maxf = t.inputs().sojourn_maxformula();
            if corrupt {
                negate(&mut maxf);
            }
            let func = t.inputs().sojourn_functional();
            max_abs_diff(&lindley, &maxf)
                .max(max_abs_diff(&lindley, &func))
                .max(max_abs_diff(&maxf, &func))
        })
        .reduce(|| 0.0, f64::max);
    (
        dev,
        "Lindley recursion, max formula and F(U,V,1)(n) for M_n".into(),
    )
}

fn transfer_count(
    trajs: &[TandemTrajectory],
    c: &VerifyConfig,
    seed: u64,
    corrupt: bool,
) -> (f64, String) {
    let root = SeededStream::new(seed, "verify/transfer-count/queries");
    let dev = trajs
        .par_iter()
        .enumerate()
        .map(|(i, t)| {
            let mut via_h = t.inputs().transfer_times_via_h();
            if corrupt {
                negate(&mut via_h);
            }
            let end = t.transfer().last().copied().unwrap_or(1.0) * 1.05;
            let mut rng = root.child(i).rng();
            (0..c.queries)
                .map(|_| {
                    let s = rng.random::<f64>() * end;
                    t.arrivals_q2(s).abs_diff(count_up_to(&via_h, s)) as f64
                })
                .fold(0.0, f64::max)
        })
        .reduce(|| 0.0, f64::max);
    (
        dev,
        format!(
            "R(t) by definition and through H at {} random times per instance",
            c.queries
        ),
    )
}

fn random_path(rng: &mut impl Rng) -> anyhow::Result<StepPath> {
    let len = rng.random_range(0..60);
    let mut t = 0.0;
    let (mut bs, mut vs) = (Vec::with_capacity(len), Vec::with_capacity(len));
    for _ in 0..len {
        t += rng.random_range(0.01..3.0);
        bs.push(t);
        vs.push(rng.random_range(-5.0..5.0));
    }
    Ok(StepPath::new(rng.random_range(-5.0..5.0), bs, vs)?)
}

fn hscale(c: &VerifyConfig, seed: u64, corrupt: bool) -> anyhow::Result<(f64, String)> {
    let root = SeededStream::new(seed, "verify/hscale");
    let devs: Vec<f64> = (0..c.tuples)
        .into_par_iter()
        .map(|i| -> anyhow::Result<f64> {
            let mut rng = root.child(i).rng();
            let x = random_path(&mut rng)?;
            let y = random_path(&mut rng)?;
            let shift = rng.random_range(0.0..3.0);
            let a = 10f64.powf(rng.random_range(-2.0..2.0));
            let n = 10f64.powf(rng.random_range(-2.0..2.0));
            let lhs = idle_h(&x, &y, shift).scale(a, n)?;
            let mut rhs = idle_h(&x.scale(a, n)?, &y.scale(a, n)?, shift / n);
            if corrupt {
                rhs = rhs.zip_with(&StepPath::constant(0.0), |v, _| -v);
            }
            let norm = lhs
                .values()
                .iter()
                .fold(lhs.value_at_zero().abs(), |m, v| m.max(v.abs()))
                .max(f64::MIN_POSITIVE);
            Ok(sup_distance(&lhs, &rhs, 1e-12) / norm)
        })
        .collect::<anyhow::Result<_>>()?;
    let dev = devs.into_iter().fold(0.0, f64::max);
    Ok((
        dev,
        format!(
            "relative deviation of a^-1 H(x,y,c)(nt) from H(x^n,y^n,c/n)(t) over {} tuples",
            c.tuples
        ),
    ))
}

pub fn run(cfg: &ExperimentConfig, out: &RunDir) -> anyhow::Result<Status> {
    let c = &cfg.verify;
    let mut results = Vec::new();
    for &suite in &c.suites {
        let corrupt = c.corrupt == Some(suite);
        let (dev, detail) = match suite {
            Suite::Counterexample => counterexample(corrupt)?,
            Suite::Idleness => idleness(&instances(c, cfg.seed, suite)?, corrupt),
            Suite::Sojourn => sojourn(&instances(c, cfg.seed, suite)?, corrupt),
            Suite::TransferCount => {
                transfer_count(&instances(c, cfg.seed, suite)?, c, cfg.seed, corrupt)
            }
            Suite::Hscale => hscale(c, cfg.seed, corrupt)?,
        };
        let passed = dev <= c.tol;
        println!(
            "{:<15} max deviation {dev:.3e} (tol {:e}) {}",
            suite.name(),
            c.tol,
            if passed { "PASS" } else { "FAIL" }
        );
        results.push(SuiteResult {
            suite: suite.name(),
            max_deviation: dev,
            tolerance: c.tol,
            passed,
            detail,
        });
    }
    let passed = results.iter().all(|r| r.passed);
    out.write_json(
        "report.json",
        &Report {
            command: "verify",
            passed,
            config: cfg,
            results,
        },
    )?;
    Ok(if passed {
        Status::Pass
    } else {
        Status::AcceptanceFailure
    })
}
