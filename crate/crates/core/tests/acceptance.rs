//! End-to-end acceptance run. Each criterion prints one PASS/FAIL line; the
//! process exits nonzero if any fails.
//!
//! Pass criterion numbers as arguments to run a subset, e.g.
//! `cargo test --test acceptance -- 1 5 8`.

use std::process::ExitCode;
use std::time::Instant;

use rayon::prelude::*;

use plateau_core::limitlaw::{LimitLaw, LimitLawParams};
use plateau_core::limitproc::{sample_x_at, sample_z, LimitSpec, SmallJumps};
use plateau_core::paths::{idle_h, plateau_f, sup_distance};
use plateau_core::scaling::{
    default_budget, fluid_r, scaled_plateau, sup_deviation_from_line, HeavyTrafficFamily,
    QueueModel,
};
use plateau_core::stats::EmpiricalSample;
use plateau_core::tandem::count_up_to;
use plateau_core::{DistSpec, SeededStream, StepPath, TandemTrajectory};
use rand::Rng;

const SEED: u64 = 20_160_712;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn figure_one_model() -> QueueModel {
    QueueModel::new(
        DistSpec::exponential(1.0 / 3.1).unwrap(),
        DistSpec::pareto(1.0, 1.5).unwrap(),
    )
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

fn c1_counterexample() -> Outcome {
    let start = Instant::now();
    let x = StepPath::indicator(1.0)
        .unwrap()
        .add(&StepPath::indicator(2.0).unwrap());
    let y = StepPath::indicator(1.0).unwrap();
    let f = plateau_f(&x, &y, 0.0).canonical();
    let elapsed = start.elapsed();
    let expected = StepPath::new(0.0, vec![1.0, 2.0], vec![1.0, 0.0]).unwrap();
    let ok = f == expected && elapsed.as_secs_f64() < 1e-3;
    outcome(
        ok,
        format!(
            "F = {:?} on breakpoints {:?}, {:.1} us",
            f.values(),
            f.breakpoints(),
            elapsed.as_secs_f64() * 1e6
        ),
    )
}

fn identity_instances() -> Vec<TandemTrajectory> {
    let model = figure_one_model();
    let root = SeededStream::new(SEED, "acceptance/identities");
    (0..100)
        .into_par_iter()
        .map(|i| TandemTrajectory::build(model.inputs_for_jobs(10_000, &root.child(i)).unwrap()))
        .collect()
}

fn c2_idleness(instances: &[TandemTrajectory]) -> Outcome {
    let worst = instances
        .par_iter()
        .map(|traj| {
            let closed = traj.inputs().idleness_closed_form_all();
            let via_h = traj.inputs().idleness_via_h_all();
            let event: Vec<f64> = traj.cum_u().iter().map(|t| traj.idleness_at(*t)).collect();
            max_abs_diff(&closed, &via_h)
                .max(max_abs_diff(&closed, &event))
                .max(max_abs_diff(&via_h, &event))
        })
        .reduce(|| 0.0, f64::max);
    outcome(
        worst <= 1e-9,
        format!("max |ΔI_n| = {worst:.3e} over 100 x 10^4 jobs"),
    )
}

fn c3_sojourn(instances: &[TandemTrajectory]) -> Outcome {
    let worst = instances
        .par_iter()
        .map(|traj| {
            let lindley = traj.inputs().sojourn_lindley();
            let maxf = traj.inputs().sojourn_maxformula();
            let func = traj.inputs().sojourn_functional();
            max_abs_diff(&lindley, &maxf)
                .max(max_abs_diff(&lindley, &func))
                .max(max_abs_diff(&maxf, &func))
                .max(max_abs_diff(&lindley, traj.sojourn()))
        })
        .reduce(|| 0.0, f64::max);
    outcome(
        worst <= 1e-9,
        format!("max |ΔM_n| = {worst:.3e} over 100 x 10^4 jobs"),
    )
}

fn c4_transfer_count(instances: &[TandemTrajectory]) -> Outcome {
    let root = SeededStream::new(SEED, "acceptance/r-queries");
    let mismatches: usize = instances
        .par_iter()
        .enumerate()
        .map(|(i, traj)| {
            let via_h = traj.inputs().transfer_times_via_h();
            let end = traj.transfer().last().copied().unwrap_or(0.0) * 1.05;
            let mut rng = root.child(i).rng();
            (0..1000)
                .filter(|_| {
                    let t = rng.random::<f64>() * end;
                    traj.arrivals_q2(t) != count_up_to(&via_h, t)
                })
                .count()
        })
        .sum();
    outcome(
        mismatches == 0,
        format!("{mismatches} mismatches in 10^5 queries"),
    )
}

fn random_path(rng: &mut impl Rng, len: usize) -> StepPath {
    let mut t = 0.0;
    let (mut bs, mut vs) = (Vec::new(), Vec::new());
    for _ in 0..len {
        t += rng.random_range(0.01..3.0);
        bs.push(t);
        vs.push(rng.random_range(-5.0..5.0));
    }
    StepPath::new(rng.random_range(-5.0..5.0), bs, vs).unwrap()
}

fn c5_hscale() -> Outcome {
    let mut rng = SeededStream::new(SEED, "acceptance/hscale").rng();
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let (lx, ly) = (rng.random_range(0..60), rng.random_range(0..60));
        let x = random_path(&mut rng, lx);
        let y = random_path(&mut rng, ly);
        let c = rng.random_range(0.0..3.0);
        let a = 10f64.powf(rng.random_range(-2.0..2.0));
        let n = 10f64.powf(rng.random_range(-2.0..2.0));
        let lhs = idle_h(&x, &y, c).scale(a, n).unwrap();
        let rhs = idle_h(&x.scale(a, n).unwrap(), &y.scale(a, n).unwrap(), c / n);
        let norm = lhs
            .values()
            .iter()
            .fold(lhs.value_at_zero().abs(), |m, v| m.max(v.abs()))
            .max(f64::MIN_POSITIVE);
        worst = worst.max(sup_distance(&lhs, &rhs, 1e-12) / norm);
    }
    outcome(
        worst <= 1e-12,
        format!("max relative deviation {worst:.3e} over 10^3 tuples"),
    )
}

fn c6_fluid() -> Outcome {
    let model = figure_one_model();
    let r = 1e4;
    let root = SeededStream::new(SEED, "acceptance/fluid");
    let budget = default_budget(&model, r);
    let devs: Vec<f64> = (0..100)
        .into_par_iter()
        .map(|i| {
            let p = fluid_r(&model, r, 1.0, budget, &root.child(i)).unwrap();
            sup_deviation_from_line(&p, 1.0 / 3.1, 1.0)
        })
        .collect();
    let within = devs.iter().filter(|d| **d <= 0.05).count();
    let worst = devs.iter().copied().fold(0.0, f64::max);
    outcome(
        within >= 95,
        format!("{within}/100 within 0.05, worst {worst:.4}"),
    )
}

fn c7_laplace() -> Outcome {
    let s_grid = [0.5, 1.0, 2.0];
    let mut pass = true;
    let mut parts = Vec::new();
    for alpha in [1.3, 1.5, 1.7] {
        let spec = LimitSpec::new(alpha, 1e-4, SmallJumps::VarianceMatched).unwrap();
        let root = SeededStream::new(SEED, format!("acceptance/laplace/{alpha}"));
        let xs: Vec<f64> = (0..100_000u32)
            .into_par_iter()
            .map(|i| sample_x_at(&spec, 1.0, &mut root.child(i).rng()).unwrap())
            .collect();
        for s in s_grid {
            let mean = xs.iter().map(|x| (-s * x).exp()).sum::<f64>() / xs.len() as f64;
            let err = (mean.ln() - (s + s.powf(alpha))).abs();
            pass &= err <= 0.05;
            parts.push(format!("a={alpha} s={s}: {err:.4}"));
        }
    }
    outcome(
        pass,
        format!("|log E e^(-sX(1)) - (s+s^a)|: {}", parts.join(", ")),
    )
}

fn c8_kappa() -> Outcome {
    let mut worst_res: f64 = 0.0;
    let mut worst_rel: f64 = 0.0;
    let mut slopes = Vec::new();
    let mut pass = true;
    for alpha in [1.3, 1.5, 1.7] {
        let params = LimitLawParams::new(alpha).unwrap();
        let grid: Vec<f64> = (0..200)
            .map(|k| 10f64.powf(-3.0 + 7.0 * k as f64 / 199.0))
            .collect();
        let (res, rel) = grid
            .par_iter()
            .map(|q| {
                let k = params.kappa(*q).unwrap();
                let res = params.kappa_residual(*q, k).abs();
                let other = q * params.h_via_phi(*q).unwrap();
                (res, (other / k - 1.0).abs())
            })
            .reduce(|| (0.0, 0.0), |a, b| (a.0.max(b.0), a.1.max(b.1)));
        worst_res = worst_res.max(res);
        worst_rel = worst_rel.max(rel);
        let slope = (params.kappa(1e4).unwrap() / params.kappa(1e2).unwrap()).ln() / 100f64.ln();
        pass &= (slope - (1.0 - alpha)).abs() <= 0.05;
        slopes.push(format!("a={alpha}: {slope:.4}"));
    }
    pass &= worst_res <= 1e-10 && worst_rel <= 1e-9;
    outcome(
        pass,
        format!(
            "residual {worst_res:.2e}, two-route rel {worst_rel:.2e}, tail slopes {}",
            slopes.join(", ")
        ),
    )
}

fn c9_limit_law() -> Outcome {
    let alpha = 1.5;
    let levels = [0.5, 1.0, 2.0];
    let spec = LimitSpec::new(alpha, 1e-4, SmallJumps::VarianceMatched).unwrap();
    let root = SeededStream::new(SEED, "acceptance/limit-law");
    let samples: Vec<Vec<f64>> = (0..5000u32)
        .into_par_iter()
        .map(|i| sample_z(&spec, &levels, &root.child(i), 1e5).unwrap())
        .collect();
    let law = LimitLaw::for_alpha(alpha).unwrap();
    let mut pass = true;
    let mut parts = Vec::new();
    for (j, v) in levels.iter().enumerate() {
        let z = EmpiricalSample::new(samples.iter().map(|s| s[j]).collect()).unwrap();
        let d = z.ks_distance(|y| law.cdf(*v, y).unwrap());
        pass &= d <= 0.05;
        parts.push(format!("v={v}: {d:.4}"));
    }
    outcome(pass, format!("KS(Z(v), F_v): {}", parts.join(", ")))
}

fn c10_demo_invariants() -> Outcome {
    let inputs = figure_one_model()
        .inputs_for_jobs(1000, &SeededStream::new(SEED, "demo"))
        .unwrap();
    let lindley = inputs.sojourn_lindley();
    let traj = TandemTrajectory::build(inputs);
    let grid = traj.event_grid();
    let mut probes = grid.clone();
    probes.extend(grid.windows(2).map(|w| 0.5 * (w[0] + w[1])));
    let plateau_below = grid
        .iter()
        .filter(|t| traj.plateau(**t) < traj.w2(**t))
        .count();
    let negative = probes
        .iter()
        .filter(|t| traj.w1(**t) < 0.0 || traj.w2(**t) < 0.0 || traj.w2_left(**t) < 0.0)
        .count();
    let v = traj.inputs().v();
    let mut empty_bracket = 0;
    let mut bracket_mismatch = 0;
    for k in 0..traj.len() {
        let bracket_zero = k == 0 || traj.q2_departure()[k - 1] <= traj.transfer()[k];
        if bracket_zero {
            empty_bracket += 1;
            if traj.sojourn()[k] != v[k] || lindley[k] != v[k] {
                bracket_mismatch += 1;
            }
        }
    }
    outcome(
        plateau_below == 0 && negative == 0 && bracket_mismatch == 0,
        format!(
            "M<W2 at {plateau_below}/{} events, negative workload at {negative} probes, \
             M_n != v_n at {bracket_mismatch}/{empty_bracket} empty-bracket jobs",
            grid.len()
        ),
    )
}

fn c11_stabilization() -> Outcome {
    let family = HeavyTrafficFamily::new(
        1.5,
        1.0,
        DistSpec::exponential(1.0).unwrap(),
        DistSpec::pareto(1.0, 1.5).unwrap(),
    )
    .unwrap();
    let levels = [1e3, 1e4, 1e5];
    let samples: Vec<EmpiricalSample> = levels
        .iter()
        .map(|r| {
            let model = family.model(*r).unwrap();
            let budget = default_budget(&model, *r);
            let root = SeededStream::new(SEED, format!("acceptance/stabilization/{r}"));
            let m: Vec<f64> = (0..2000u32)
                .into_par_iter()
                .map(|i| {
                    scaled_plateau(&model, 1.5, *r, 1.0, budget, &root.child(i))
                        .unwrap()
                        .eval(1.0)
                        .unwrap()
                })
                .collect();
            EmpiricalSample::new(m).unwrap()
        })
        .collect();
    let d1 = samples[0].ks_two_sample(&samples[1]);
    let d2 = samples[1].ks_two_sample(&samples[2]);
    outcome(
        d2 < d1,
        format!("KS(1e3,1e4) = {d1:.4}, KS(1e4,1e5) = {d2:.4}"),
    )
}

fn main() -> ExitCode {
    let selected: Vec<usize> = std::env::args()
        .skip(1)
        .filter_map(|a| a.parse().ok())
        .collect();
    let wanted = |k: usize| selected.is_empty() || selected.contains(&k);

    let mut failures = 0;
    let mut report = |k: usize, name: &str, run: &mut dyn FnMut() -> Outcome| {
        if !wanted(k) {
            return;
        }
        let start = Instant::now();
        let o = run();
        let tag = if o.pass { "PASS" } else { "FAIL" };
        if !o.pass {
            failures += 1;
        }
        println!(
            "{tag} [{k:>2}] {name}: {} ({:.1}s)",
            o.detail,
            start.elapsed().as_secs_f64()
        );
    };

    report(1, "plateau counterexample", &mut c1_counterexample);
    let instances = if wanted(2) || wanted(3) || wanted(4) {
        identity_instances()
    } else {
        Vec::new()
    };
    let inst = &instances[..];
    report(2, "idleness three ways", &mut || c2_idleness(inst));
    report(3, "sojourn three ways", &mut || c3_sojourn(inst));
    report(4, "second-station arrival count", &mut || {
        c4_transfer_count(inst)
    });
    report(5, "idleness map scaling", &mut c5_hscale);
    report(6, "fluid limit of R", &mut c6_fluid);
    report(7, "limit process Laplace exponent", &mut c7_laplace);
    report(8, "kappa solver", &mut c8_kappa);
    report(9, "limit law of Z(v)", &mut c9_limit_law);
    report(10, "demo run invariants", &mut c10_demo_invariants);
    report(11, "scaled plateau stabilization", &mut c11_stabilization);

    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failures} acceptance criteria failed");
        ExitCode::FAILURE
    }
}
