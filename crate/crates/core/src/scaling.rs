//! Heavy-traffic families and their diffusion-scaled processes.
//!
//! The `r`-th model keeps the service law fixed (mean `ν`) and scales every
//! interarrival variate so that the mean becomes `μ^r = ν(1 − γ a_r / r)`
//! with `a_r = r^{1/α}`. Then `ρ^r = μ^r/ν` satisfies
//! `(r/a_r)(1 − ρ^r) = γ` at every `r`. Arrival variates come from a fixed
//! unit-mean stream, so changing `γ` rescales the same draws.

use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::paths::StepPath;
use crate::randomgen::{DistSpec, SeededStream};
use crate::tandem::{TandemInputs, TandemTrajectory};

/// Arrival and service laws of one tandem model, with a multiplicative
/// factor on the interarrival variates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QueueModel {
    pub arrival: DistSpec,
    pub service: DistSpec,
    pub arrival_scale: f64,
}

impl QueueModel {
    pub fn new(arrival: DistSpec, service: DistSpec) -> Self {
        Self {
            arrival,
            service,
            arrival_scale: 1.0,
        }
    }

    /// Mean interarrival time.
    pub fn arrival_mean(&self) -> f64 {
        self.arrival_scale * self.arrival.mean()
    }

    /// The first `n` jobs.
    pub fn inputs_for_jobs(&self, n: usize, stream: &SeededStream) -> Result<TandemInputs> {
        let mut ra = stream.child("arrivals").rng();
        let mut rs = stream.child("services").rng();
        let u = (0..n)
            .map(|_| self.arrival_scale * self.arrival.draw(&mut ra))
            .collect();
        let v = self.service.sample_with(&mut rs, n);
        TandemInputs::new(u, v)
    }

    /// Jobs up to and including the first arrival after `time`, so that
    /// every process is exact on `[0, time]`.
    pub fn inputs_until(
        &self,
        time: f64,
        budget: usize,
        stream: &SeededStream,
    ) -> Result<TandemInputs> {
        let mut ra = stream.child("arrivals").rng();
        let mut rs = stream.child("services").rng();
        let (mut u, mut v) = (Vec::new(), Vec::new());
        let mut clock = 0.0;
        while clock <= time {
            if u.len() == budget {
                return Err(Error::InsufficientJobs {
                    budget,
                    target_time: time,
                    reached: clock,
                });
            }
            let x = self.arrival_scale * self.arrival.draw(&mut ra);
            clock += x;
            u.push(x);
            v.push(self.service.draw(&mut rs));
        }
        TandemInputs::new(u, v)
    }
}

/// `a_r = r^{1/α}`.
pub fn norming(alpha: f64, r: f64) -> f64 {
    r.powf(1.0 / alpha)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HeavyTrafficFamily {
    pub alpha: f64,
    pub gamma: f64,
    /// Fixed service law; its mean is `ν`.
    pub service: DistSpec,
    /// Interarrival law before rescaling to mean `μ^r`.
    pub arrival: DistSpec,
}

impl HeavyTrafficFamily {
    pub fn new(alpha: f64, gamma: f64, arrival: DistSpec, service: DistSpec) -> Result<Self> {
        if !(alpha > 1.0 && alpha < 2.0) {
            return Err(invalid(format!("alpha must lie in (1,2), got {alpha}")));
        }
        if !gamma.is_finite() {
            return Err(invalid("gamma must be finite"));
        }
        if !service.mean().is_finite() || !arrival.mean().is_finite() {
            return Err(invalid("arrival and service laws need finite means"));
        }
        Ok(Self {
            alpha,
            gamma,
            service,
            arrival,
        })
    }

    pub fn nu(&self) -> f64 {
        self.service.mean()
    }

    pub fn a(&self, r: f64) -> f64 {
        norming(self.alpha, r)
    }

    /// `μ^r = ν(1 − γ a_r/r)`.
    pub fn mu(&self, r: f64) -> Result<f64> {
        if !(r > 0.0 && r.is_finite()) {
            return Err(invalid(format!("r must be positive, got {r}")));
        }
        let mu = self.nu() * (1.0 - self.gamma * self.a(r) / r);
        if mu > 0.0 {
            Ok(mu)
        } else {
            Err(invalid(format!(
                "r={r} too small for gamma={}: mean interarrival would be {mu}",
                self.gamma
            )))
        }
    }

    /// `ρ^r = μ^r/ν^r`.
    pub fn rho(&self, r: f64) -> Result<f64> {
        Ok(self.mu(r)? / self.nu())
    }

    pub fn model(&self, r: f64) -> Result<QueueModel> {
        Ok(QueueModel {
            arrival: self.arrival,
            service: self.service,
            arrival_scale: self.mu(r)? / self.arrival.mean(),
        })
    }
}

/// Job budget that covers time `r·horizon` with a wide margin.
pub fn default_budget(model: &QueueModel, time: f64) -> usize {
    let expected = time / model.arrival_mean();
    (4.0 * expected + 1000.0).ceil() as usize
}

/// Restriction of a step path to `[0, horizon]`.
fn truncate(p: &StepPath, horizon: f64) -> StepPath {
    let k = p.breakpoints().partition_point(|t| *t <= horizon);
    StepPath::from_sorted(
        p.value_at_zero(),
        p.breakpoints()[..k].to_vec(),
        p.values()[..k].to_vec(),
    )
}

/// `M̌^r(t) = a_r^{-1} M^r(r t)` on `[0, horizon]`, where `a_r = r^{1/α}`.
pub fn scaled_plateau(
    model: &QueueModel,
    alpha: f64,
    r: f64,
    horizon: f64,
    budget: usize,
    stream: &SeededStream,
) -> Result<StepPath> {
    let traj = TandemTrajectory::build(model.inputs_until(r * horizon, budget, stream)?);
    let scaled = traj.plateau_path().scale(norming(alpha, r), r)?;
    Ok(truncate(&scaled, horizon))
}

/// `R̄^r(t) = R(r t)/r` on `[0, horizon]`.
pub fn fluid_r(
    model: &QueueModel,
    r: f64,
    horizon: f64,
    budget: usize,
    stream: &SeededStream,
) -> Result<StepPath> {
    let traj = TandemTrajectory::build(model.inputs_until(r * horizon, budget, stream)?);
    let counts: Vec<f64> = (1..=traj.len()).map(|k| k as f64 / r).collect();
    let breaks: Vec<f64> = traj.transfer().iter().map(|d| d / r).collect();
    Ok(truncate(
        &StepPath::from_sorted(0.0, breaks, counts),
        horizon,
    ))
}

/// `sup_{0≤t≤horizon} |p(t) − slope·t|`, exact for a step path.
pub fn sup_deviation_from_line(p: &StepPath, slope: f64, horizon: f64) -> f64 {
    let mut d: f64 = 0.0;
    let mut left = 0.0;
    let mut value = p.value_at_zero();
    for (t, v) in p.breakpoints().iter().zip(p.values()) {
        if *t > horizon {
            break;
        }
        d = d
            .max((value - slope * left).abs())
            .max((value - slope * t).abs());
        left = *t;
        value = *v;
    }
    d.max((value - slope * left).abs())
        .max((value - slope * horizon).abs())
}

/// A step path minus a linear drift, `t ↦ steps(t) − slope·t`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DriftedStepPath {
    pub steps: StepPath,
    pub slope: f64,
}

impl DriftedStepPath {
    pub fn eval(&self, t: f64) -> Result<f64> {
        Ok(self.steps.eval(t)? - self.slope * t)
    }

    /// `sup_{0≤t≤horizon}` of the absolute value, attained at breakpoints or
    /// their left limits.
    pub fn sup_abs(&self, horizon: f64) -> f64 {
        sup_deviation_from_line(&self.steps, self.slope, horizon)
    }
}

/// Centered and scaled primitives
/// `Ǔ^r(t) = a_r^{-1}(U(rt) − r μ^r t)` and `V̌^r(t) = a_r^{-1}(V(rt) − r ν t)`
/// from the first `⌊r·horizon⌋` jobs. Here `U(t) = U_⌊t⌋` is job-indexed.
pub fn scaled_primitives(
    model: &QueueModel,
    alpha: f64,
    r: f64,
    horizon: f64,
    stream: &SeededStream,
) -> Result<(DriftedStepPath, DriftedStepPath)> {
    if !(r > 0.0 && horizon > 0.0) {
        return Err(invalid("r and horizon must be positive"));
    }
    let n = (r * horizon).floor() as usize;
    let inputs = model.inputs_for_jobs(n, stream)?;
    let a = norming(alpha, r);
    let u = inputs.arrival_path().scale(a, r)?;
    let v = inputs.work_path().scale(a, r)?;
    Ok((
        DriftedStepPath {
            steps: u,
            slope: r * model.arrival_mean() / a,
        },
        DriftedStepPath {
            steps: v,
            slope: r * model.service.mean() / a,
        },
    ))
}
