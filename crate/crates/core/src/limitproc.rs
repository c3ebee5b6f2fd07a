//! The spectrally positive limit process `X(t) = S(t) − t`, where `S` is
//! α-stable with `E[e^{-sS(t)}] = e^{t s^α}`, and its reflection at the running
//! infimum.
//!
//! Paths are jump-exact: jumps above a truncation level `ε` come from the
//! Poisson random measure `c_α x^{-1-α} dx`, and between jumps the path is a
//! straight line with slope `θ < 0`. Running infimum, local time, inverse
//! local time and excursion boundaries are then closed-form on each segment.
//!
//! Jumps below `ε` are either dropped (`SmallJumps::Drop`) or replaced by a
//! compound Poisson stream of fixed-size jumps with the same variance
//! (`SmallJumps::VarianceMatched`, the default). Either way the drift is
//! adjusted so that every retained jump is fully compensated and
//! `E[X(t)] = −t`.

use std::io::Write;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::limitlaw::c_alpha;
use crate::paths::fmt_f64;
use crate::randomgen::{poisson, JumpMeasure, SeededStream};

/// Ratio of the surrogate jump size to `ε`.
const SURROGATE_FACTOR: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Default)]
pub enum SmallJumps {
    /// Jumps below `ε` are discarded; only their mean is compensated.
    Drop,
    /// Jumps below `ε` are replaced by jumps of size `10ε` at the rate that
    /// matches their variance.
    #[default]
    VarianceMatched,
}

/// Truncated generator of the limit process.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LimitSpec {
    pub alpha: f64,
    pub c: f64,
    pub eps: f64,
    pub small_jumps: SmallJumps,
}

impl LimitSpec {
    pub fn new(alpha: f64, eps: f64, small_jumps: SmallJumps) -> Result<Self> {
        let c = c_alpha(alpha)?;
        JumpMeasure::new(alpha, c, eps)?;
        Ok(Self {
            alpha,
            c,
            eps,
            small_jumps,
        })
    }

    pub fn measure(&self) -> JumpMeasure {
        JumpMeasure {
            alpha: self.alpha,
            c: self.c,
            eps: self.eps,
        }
    }

    /// Variance per unit time of the jumps below `ε`,
    /// `c_α ε^{2−α}/(2−α)`.
    pub fn small_jump_variance(&self) -> f64 {
        self.c * self.eps.powf(2.0 - self.alpha) / (2.0 - self.alpha)
    }

    /// `(size, rate)` of the surrogate stream, if any.
    pub fn surrogate(&self) -> Option<(f64, f64)> {
        match self.small_jumps {
            SmallJumps::Drop => None,
            SmallJumps::VarianceMatched => {
                let b = SURROGATE_FACTOR * self.eps;
                Some((b, self.small_jump_variance() / (b * b)))
            }
        }
    }

    /// Drift that compensates every retained jump.
    pub fn compensation_drift(&self) -> f64 {
        let main = -self.c * self.eps.powf(1.0 - self.alpha) / (self.alpha - 1.0);
        let extra = self.surrogate().map_or(0.0, |(b, rate)| -b * rate);
        main + extra
    }

    /// Total slope between jumps, `−1 +` compensation.
    pub fn slope(&self) -> f64 {
        -1.0 + self.compensation_drift()
    }

    /// Jumps per unit time.
    pub fn jump_rate(&self) -> f64 {
        self.measure().rate() + self.surrogate().map_or(0.0, |(_, r)| r)
    }

    pub fn jumps(&self, stream: &SeededStream) -> JumpSource {
        JumpSource::new(*self, stream)
    }
}

/// Jumps of the truncated generator in time order, including surrogate
/// jumps. Prefix-consistent: a longer horizon extends, never alters.
pub struct JumpSource {
    measure: JumpMeasure,
    total_rate: f64,
    main_share: f64,
    surrogate_size: f64,
    rng: ChaCha8Rng,
    t: f64,
}

impl JumpSource {
    pub fn new(spec: LimitSpec, stream: &SeededStream) -> Self {
        let main = spec.measure().rate();
        let (surrogate_size, extra) = spec.surrogate().unwrap_or((0.0, 0.0));
        Self {
            measure: spec.measure(),
            total_rate: main + extra,
            main_share: main / (main + extra),
            surrogate_size,
            rng: stream.rng(),
            t: 0.0,
        }
    }
}

impl Iterator for JumpSource {
    type Item = (f64, f64);

    #[inline]
    fn next(&mut self) -> Option<(f64, f64)> {
        let e: f64 = Exp1.sample(&mut self.rng);
        self.t += e / self.total_rate;
        let size = if self.main_share >= 1.0 || self.rng.random::<f64>() < self.main_share {
            self.measure.draw_size(&mut self.rng)
        } else {
            self.surrogate_size
        };
        Some((self.t, size))
    }
}

/// `X(t)` at a single time, without jump times: Poisson counts plus sizes.
pub fn sample_x_at(spec: &LimitSpec, t: f64, rng: &mut ChaCha8Rng) -> Result<f64> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::NegativeTime(t));
    }
    let m = spec.measure();
    let n = poisson(rng, m.rate() * t)?;
    let mut sum = 0.0;
    for _ in 0..n {
        sum += m.draw_size(rng);
    }
    if let Some((b, rate)) = spec.surrogate() {
        sum += b * poisson(rng, rate * t)? as f64;
    }
    Ok(spec.slope() * t + sum)
}

/// A maximal interval on which the reflected process is positive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExcursionRecord {
    /// Local time during the excursion.
    pub level: f64,
    pub start: f64,
    pub end: f64,
    pub lifetime: f64,
    /// Largest jump inside the excursion.
    pub max_jump: f64,
    /// False when the excursion is still open at the horizon.
    pub complete: bool,
}

/// Piecewise-linear path with upward jumps on `[0, horizon]`, with its
/// reflection precomputed.
#[derive(Debug, Clone, Serialize)]
pub struct JumpDriftPath {
    drift: f64,
    compensation_drift: f64,
    horizon: f64,
    times: Vec<f64>,
    sizes: Vec<f64>,
    /// `L(t_j)`.
    #[serde(skip)]
    local: Vec<f64>,
    /// `Y(t_j)`, after the jump.
    #[serde(skip)]
    reflected: Vec<f64>,
    /// `max_{i ≤ j} (J_i + L(t_i))`.
    #[serde(skip)]
    best: Vec<f64>,
    /// Whether jump `j` finds `Y = 0`.
    #[serde(skip)]
    starts: Vec<bool>,
}

impl JumpDriftPath {
    pub fn new(
        drift: f64,
        compensation_drift: f64,
        jumps: Vec<(f64, f64)>,
        horizon: f64,
    ) -> Result<Self> {
        if !(horizon > 0.0 && horizon.is_finite()) {
            return Err(invalid(format!("horizon must be positive, got {horizon}")));
        }
        if !(drift + compensation_drift < 0.0) {
            return Err(invalid("total drift must be negative"));
        }
        let (times, sizes): (Vec<f64>, Vec<f64>) = jumps.into_iter().unzip();
        if times.iter().any(|t| !(*t >= 0.0 && *t <= horizon)) {
            return Err(invalid("jump times must lie in [0, horizon]"));
        }
        if times.windows(2).any(|w| w[0] >= w[1]) {
            return Err(invalid("jump times must be strictly increasing"));
        }
        if sizes.iter().any(|x| !(*x > 0.0 && x.is_finite())) {
            return Err(invalid("jump sizes must be positive"));
        }
        let mut path = Self {
            drift,
            compensation_drift,
            horizon,
            times,
            sizes,
            local: Vec::new(),
            reflected: Vec::new(),
            best: Vec::new(),
            starts: Vec::new(),
        };
        path.reflect();
        Ok(path)
    }

    fn reflect(&mut self) {
        let a = self.drain_rate();
        let n = self.times.len();
        self.local = Vec::with_capacity(n);
        self.reflected = Vec::with_capacity(n);
        self.best = Vec::with_capacity(n);
        self.starts = Vec::with_capacity(n);
        let (mut t, mut y, mut l, mut best) = (0.0, 0.0, 0.0, f64::NEG_INFINITY);
        for (tj, jump) in self.times.iter().zip(&self.sizes) {
            let yy = y - a * (tj - t);
            if yy < 0.0 {
                l -= yy;
                y = 0.0;
            } else {
                y = yy;
            }
            t = *tj;
            self.starts.push(y == 0.0);
            best = best.max(jump + l);
            y += jump;
            self.local.push(l);
            self.reflected.push(y);
            self.best.push(best);
        }
    }

    pub fn slope(&self) -> f64 {
        self.drift + self.compensation_drift
    }

    fn drain_rate(&self) -> f64 {
        -self.slope()
    }

    pub fn drift(&self) -> f64 {
        self.drift
    }

    pub fn compensation_drift(&self) -> f64 {
        self.compensation_drift
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn jump_times(&self) -> &[f64] {
        &self.times
    }

    pub fn jump_sizes(&self) -> &[f64] {
        &self.sizes
    }

    /// Jumps at or before `t`.
    fn count_to(&self, t: f64) -> usize {
        self.times.partition_point(|s| *s <= t)
    }

    /// `X(t)` from the drift and the jump sum.
    pub fn value(&self, t: f64) -> f64 {
        let k = self.count_to(t);
        self.slope() * t + neumaier_sum(&self.sizes[..k])
    }

    /// `(Y(t), L(t))`.
    pub fn reflected_at(&self, t: f64) -> (f64, f64) {
        let k = self.count_to(t);
        let (t0, y0, l0) = if k == 0 {
            (0.0, 0.0, 0.0)
        } else {
            (self.times[k - 1], self.reflected[k - 1], self.local[k - 1])
        };
        let y = y0 - self.drain_rate() * (t - t0);
        if y < 0.0 {
            (0.0, l0 - y)
        } else {
            (y, l0)
        }
    }

    pub fn y(&self, t: f64) -> f64 {
        self.reflected_at(t).0
    }

    pub fn local_time(&self, t: f64) -> f64 {
        self.reflected_at(t).1
    }

    /// `L^{-1}(v) = inf{t : L(t) > v}`, defined for `v < L(horizon)`.
    pub fn inverse_local_time(&self, v: f64) -> Result<f64> {
        if !(v >= 0.0) {
            return Err(invalid(format!(
                "local time level must be nonnegative, got {v}"
            )));
        }
        let available = self.local_time(self.horizon);
        if v >= available {
            return Err(horizon_exceeded(v, available, self.horizon));
        }
        // Segment k starts at jump k (k = 0 is the origin); L on it runs from
        // local[k-1] to the local time at the next jump.
        let k = self.local.partition_point(|l| *l <= v);
        let (t0, y0, l0) = if k == 0 {
            (0.0, 0.0, 0.0)
        } else {
            (self.times[k - 1], self.reflected[k - 1], self.local[k - 1])
        };
        let a = self.drain_rate();
        Ok(t0 + y0 / a + (v - l0) / a)
    }

    /// `Z(v) = max(0, max_{t_j ≤ L^{-1}(v)} (J_j − (v − L(t_j))))`.
    pub fn z(&self, v: f64) -> Result<f64> {
        let tau = self.inverse_local_time(v)?;
        let k = self.count_to(tau);
        Ok(if k == 0 {
            0.0
        } else {
            (self.best[k - 1] - v).max(0.0)
        })
    }

    /// Excursions of `Y` away from zero, in time order. The last one is
    /// flagged incomplete if it is still open at the horizon.
    pub fn excursions(&self) -> Vec<ExcursionRecord> {
        let a = self.drain_rate();
        let n = self.times.len();
        let mut out = Vec::new();
        let mut open: Option<ExcursionRecord> = None;
        for j in 0..n {
            if self.starts[j] {
                open = Some(ExcursionRecord {
                    level: self.local[j],
                    start: self.times[j],
                    end: f64::NAN,
                    lifetime: f64::NAN,
                    max_jump: self.sizes[j],
                    complete: false,
                });
            } else if let Some(e) = open.as_mut() {
                e.max_jump = e.max_jump.max(self.sizes[j]);
            }
            let end = self.times[j] + self.reflected[j] / a;
            let closes = if j + 1 < n {
                self.starts[j + 1]
            } else {
                end <= self.horizon
            };
            if closes {
                if let Some(mut e) = open.take() {
                    e.end = end;
                    e.lifetime = end - e.start;
                    e.complete = true;
                    out.push(e);
                }
            }
        }
        if let Some(mut e) = open {
            e.end = self.horizon;
            e.lifetime = self.horizon - e.start;
            out.push(e);
        }
        out
    }

    /// `Z(v)` from the excursion records:
    /// `max(0, sup_{u ≤ v} (Δ(u) + u) − v)`.
    pub fn z_from_excursions(excursions: &[ExcursionRecord], v: f64) -> f64 {
        excursions
            .iter()
            .filter(|e| e.level <= v)
            .map(|e| e.max_jump + e.level - v)
            .fold(0.0, f64::max)
    }

    /// The limit plateau process `M*(t) = F(γμ e, V*, 0)(t/μ)` under the
    /// normalization `γμ = 1`, evaluated from the path values `X(t_j−)`
    /// rather than from the reflection.
    pub fn plateau_limit(&self, mu: f64) -> Result<PlateauLimit<'_>> {
        if !(mu > 0.0 && mu.is_finite()) {
            return Err(invalid(format!("mu must be positive, got {mu}")));
        }
        let n = self.times.len();
        let mut idle = Vec::with_capacity(n);
        let mut best = Vec::with_capacity(n);
        let (mut sum, mut comp) = (0.0_f64, 0.0_f64);
        let (mut h, mut b) = (0.0_f64, f64::NEG_INFINITY);
        for (t, jump) in self.times.iter().zip(&self.sizes) {
            let x_left = self.slope() * t + (sum + comp);
            h = h.max(-x_left);
            b = b.max(jump + h);
            idle.push(h);
            best.push(b);
            neumaier_add(&mut sum, &mut comp, *jump);
        }
        Ok(PlateauLimit {
            path: self,
            mu,
            idle,
            best,
        })
    }

    /// CSV with columns `t,X,Y,L` at the origin, at each jump (after the
    /// jump) and at the horizon.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let err = |e: csv::Error| invalid(format!("csv write failed: {e}"));
        w.write_record(["t", "X", "Y", "L"]).map_err(err)?;
        let grid = std::iter::once(0.0)
            .chain(self.times.iter().copied())
            .chain(std::iter::once(self.horizon));
        for t in grid {
            let (y, l) = self.reflected_at(t);
            w.write_record([fmt_f64(t), fmt_f64(self.value(t)), fmt_f64(y), fmt_f64(l)])
                .map_err(err)?;
        }
        w.flush()
            .map_err(|e| invalid(format!("csv flush failed: {e}")))
    }
}

/// `M*` accessor built by [`JumpDriftPath::plateau_limit`].
pub struct PlateauLimit<'a> {
    path: &'a JumpDriftPath,
    mu: f64,
    /// `H(t_j) = max(0, max_{i ≤ j} −X(t_i−))`.
    idle: Vec<f64>,
    /// `max_{i ≤ j} (J_i + H(t_i))`.
    best: Vec<f64>,
}

impl PlateauLimit<'_> {
    pub fn eval(&self, t: f64) -> Result<f64> {
        if t < 0.0 {
            return Err(Error::NegativeTime(t));
        }
        let tau = t / self.mu;
        let k = self.path.count_to(tau);
        let x = self.path.value(tau);
        let (h_jumps, b) = if k == 0 {
            (0.0, f64::NEG_INFINITY)
        } else {
            (self.idle[k - 1], self.best[k - 1])
        };
        let h = h_jumps.max(-x).max(0.0);
        Ok(h.max(b) - h)
    }
}

pub fn write_excursions_csv<W: Write>(excursions: &[ExcursionRecord], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let err = |e: csv::Error| invalid(format!("csv write failed: {e}"));
    w.write_record(["u", "start", "end", "lifetime", "max_jump", "complete"])
        .map_err(err)?;
    for e in excursions {
        w.write_record([
            fmt_f64(e.level),
            fmt_f64(e.start),
            fmt_f64(e.end),
            fmt_f64(e.lifetime),
            fmt_f64(e.max_jump),
            e.complete.to_string(),
        ])
        .map_err(err)?;
    }
    w.flush()
        .map_err(|e| invalid(format!("csv flush failed: {e}")))
}

fn neumaier_add(sum: &mut f64, comp: &mut f64, x: f64) {
    let t = *sum + x;
    if sum.abs() >= x.abs() {
        *comp += (*sum - t) + x;
    } else {
        *comp += (x - t) + *sum;
    }
    *sum = t;
}

fn neumaier_sum(xs: &[f64]) -> f64 {
    let (mut s, mut c) = (0.0, 0.0);
    for x in xs {
        neumaier_add(&mut s, &mut c, *x);
    }
    s + c
}

fn horizon_exceeded(requested: f64, available: f64, horizon: f64) -> Error {
    let ratio = if available > 0.0 {
        requested / available
    } else {
        4.0
    };
    Error::HorizonExceeded {
        requested,
        available,
        horizon,
        suggested_horizon: horizon * (2.0 * ratio).max(2.0),
    }
}

/// Simulates `X` on `[0, horizon]` with the `γμ = 1` normalization.
pub fn simulate_x(spec: &LimitSpec, horizon: f64, stream: &SeededStream) -> Result<JumpDriftPath> {
    if !(horizon > 0.0 && horizon.is_finite()) {
        return Err(invalid(format!("horizon must be positive, got {horizon}")));
    }
    let jumps: Vec<(f64, f64)> = spec
        .jumps(stream)
        .take_while(|(t, _)| *t <= horizon)
        .collect();
    JumpDriftPath::new(-1.0, spec.compensation_drift(), jumps, horizon)
}

/// Streaming reflection of a jump stream, for paths too long to store.
///
/// The walk advances jump by jump, tracking `Y`, `L` and the running maximum
/// of `J + L(t_j)`; completed excursions are passed to a callback.
pub struct LocalTimeWalk<I: Iterator<Item = (f64, f64)>> {
    jumps: I,
    pending: Option<(f64, f64)>,
    drain: f64,
    max_horizon: f64,
    t: f64,
    y: f64,
    l: f64,
    best: f64,
    open: Option<ExcursionRecord>,
}

impl<I: Iterator<Item = (f64, f64)>> LocalTimeWalk<I> {
    pub fn new(jumps: I, slope: f64, max_horizon: f64) -> Result<Self> {
        if !(slope < 0.0) {
            return Err(invalid("slope must be negative"));
        }
        Ok(Self {
            jumps,
            pending: None,
            drain: -slope,
            max_horizon,
            t: 0.0,
            y: 0.0,
            l: 0.0,
            best: f64::NEG_INFINITY,
            open: None,
        })
    }

    pub fn local_time(&self) -> f64 {
        self.l
    }

    pub fn time(&self) -> f64 {
        self.t
    }

    fn close_open(&mut self, on_excursion: &mut impl FnMut(&ExcursionRecord)) {
        if let Some(mut e) = self.open.take() {
            let end = self.t + self.y / self.drain;
            e.end = end;
            e.lifetime = end - e.start;
            e.complete = true;
            on_excursion(&e);
            self.t = end;
            self.y = 0.0;
        }
    }

    /// Advances until just before local time exceeds `v`, then returns
    /// `Z(v)`. Levels must be requested in nondecreasing order.
    pub fn advance_to_level(
        &mut self,
        v: f64,
        mut on_excursion: impl FnMut(&ExcursionRecord),
    ) -> Result<f64> {
        if v < self.l {
            return Err(invalid(format!(
                "level {v} already passed (local time {})",
                self.l
            )));
        }
        loop {
            let (tj, jump) = match self.pending.take() {
                Some(j) => j,
                None => self.jumps.next().unwrap_or((f64::INFINITY, 0.0)),
            };
            if tj > self.max_horizon {
                self.pending = Some((tj, jump));
                let l_end = self.l + (self.drain * (self.max_horizon - self.t) - self.y).max(0.0);
                if l_end > v {
                    if self.y - self.drain * (self.max_horizon - self.t) <= 0.0 {
                        self.close_open(&mut on_excursion);
                    }
                    return Ok((self.best - v).max(0.0));
                }
                return Err(horizon_exceeded(v, l_end, self.max_horizon));
            }
            let yy = self.y - self.drain * (tj - self.t);
            let l_next = if yy < 0.0 { self.l - yy } else { self.l };
            if yy <= 0.0 {
                self.close_open(&mut on_excursion);
            }
            if l_next > v {
                self.pending = Some((tj, jump));
                return Ok((self.best - v).max(0.0));
            }
            self.t = tj;
            self.y = yy.max(0.0);
            self.l = l_next;
            match self.open.as_mut() {
                None => {
                    self.open = Some(ExcursionRecord {
                        level: self.l,
                        start: tj,
                        end: f64::NAN,
                        lifetime: f64::NAN,
                        max_jump: jump,
                        complete: false,
                    })
                }
                Some(e) => e.max_jump = e.max_jump.max(jump),
            }
            self.best = self.best.max(jump + self.l);
            self.y += jump;
        }
    }
}

/// `Z(v)` at each of the ascending `levels` along one streamed path.
pub fn sample_z(
    spec: &LimitSpec,
    levels: &[f64],
    stream: &SeededStream,
    max_horizon: f64,
) -> Result<Vec<f64>> {
    if levels.windows(2).any(|w| w[0] > w[1]) || levels.iter().any(|v| !(*v >= 0.0)) {
        return Err(invalid("levels must be nonnegative and ascending"));
    }
    let mut walk = LocalTimeWalk::new(spec.jumps(stream), spec.slope(), max_horizon)?;
    levels
        .iter()
        .map(|v| walk.advance_to_level(*v, |_| {}))
        .collect()
}
