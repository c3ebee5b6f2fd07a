//! Seeded variate generation.
//!
//! Every stream is a ChaCha8 generator keyed by a 64-bit seed and a label. The
//! label is hashed into the generator's stream selector, so streams with
//! different labels never overlap and need no coordination between workers.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Interarrival or service distribution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum DistSpec {
    Exponential {
        rate: f64,
    },
    /// Support `[scale, ∞)` with `P(X > x) = (scale/x)^index`.
    Pareto {
        scale: f64,
        index: f64,
    },
    Deterministic {
        value: f64,
    },
    Uniform {
        lo: f64,
        hi: f64,
    },
}

impl DistSpec {
    pub fn exponential(rate: f64) -> Result<Self> {
        Self::Exponential { rate }.validated()
    }

    pub fn pareto(scale: f64, index: f64) -> Result<Self> {
        Self::Pareto { scale, index }.validated()
    }

    pub fn deterministic(value: f64) -> Result<Self> {
        Self::Deterministic { value }.validated()
    }

    pub fn uniform(lo: f64, hi: f64) -> Result<Self> {
        Self::Uniform { lo, hi }.validated()
    }

    pub fn validated(self) -> Result<Self> {
        let positive = |x: f64| x > 0.0 && x.is_finite();
        let ok = match self {
            Self::Exponential { rate } => positive(rate),
            Self::Pareto { scale, index } => positive(scale) && positive(index),
            Self::Deterministic { value } => positive(value),
            Self::Uniform { lo, hi } => lo >= 0.0 && hi.is_finite() && lo < hi,
        };
        if ok {
            Ok(self)
        } else {
            Err(invalid(format!("bad distribution parameters: {self}")))
        }
    }

    /// Mean, infinite for a Pareto law with index at most one.
    pub fn mean(&self) -> f64 {
        match *self {
            Self::Exponential { rate } => 1.0 / rate,
            Self::Pareto { scale, index } if index > 1.0 => index * scale / (index - 1.0),
            Self::Pareto { .. } => f64::INFINITY,
            Self::Deterministic { value } => value,
            Self::Uniform { lo, hi } => 0.5 * (lo + hi),
        }
    }

    /// Tail index for Pareto laws, `None` for light-tailed kinds.
    pub fn tail_index(&self) -> Option<f64> {
        match *self {
            Self::Pareto { index, .. } => Some(index),
            _ => None,
        }
    }

    /// One variate.
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            Self::Exponential { rate } => {
                let e: f64 = Exp1.sample(rng);
                e / rate
            }
            Self::Pareto { scale, index } => {
                // scale * U^{-1/index} written through an exponential variate.
                let e: f64 = Exp1.sample(rng);
                scale * (e / index).exp()
            }
            Self::Deterministic { value } => value,
            Self::Uniform { lo, hi } => rng.random_range(lo..hi),
        }
    }

    pub fn sample(&self, stream: &SeededStream, n: usize) -> Vec<f64> {
        let mut rng = stream.rng();
        self.sample_with(&mut rng, n)
    }

    pub fn sample_with<R: Rng + ?Sized>(&self, rng: &mut R, n: usize) -> Vec<f64> {
        (0..n).map(|_| self.draw(rng)).collect()
    }
}

impl fmt::Display for DistSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Exponential { rate } => write!(f, "exp:{rate}"),
            Self::Pareto { scale, index } => write!(f, "pareto:{scale}:{index}"),
            Self::Deterministic { value } => write!(f, "det:{value}"),
            Self::Uniform { lo, hi } => write!(f, "uniform:{lo}:{hi}"),
        }
    }
}

impl FromStr for DistSpec {
    type Err = Error;

    /// Accepts `exp:RATE`, `pareto:SCALE:INDEX`, `det:VALUE`, `uniform:LO:HI`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse {
            what: "distribution",
            input: s.to_string(),
        };
        let mut parts = s.trim().split(':');
        let kind = parts.next().ok_or_else(bad)?.to_ascii_lowercase();
        let nums = parts
            .map(|p| p.trim().parse::<f64>().map_err(|_| bad()))
            .collect::<Result<Vec<_>>>()?;
        let spec = match (kind.as_str(), nums.as_slice()) {
            ("exp" | "exponential", [rate]) => Self::Exponential { rate: *rate },
            ("pareto", [scale, index]) => Self::Pareto {
                scale: *scale,
                index: *index,
            },
            ("det" | "deterministic", [value]) => Self::Deterministic { value: *value },
            ("uniform" | "unif", [lo, hi]) => Self::Uniform { lo: *lo, hi: *hi },
            _ => return Err(bad()),
        };
        spec.validated()
    }
}

impl TryFrom<String> for DistSpec {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<DistSpec> for String {
    fn from(d: DistSpec) -> String {
        d.to_string()
    }
}

/// A reproducible random stream named by `(seed, label)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeededStream {
    pub seed: u64,
    pub label: String,
}

impl SeededStream {
    pub fn new(seed: u64, label: impl Into<String>) -> Self {
        Self {
            seed,
            label: label.into(),
        }
    }

    /// Child stream, e.g. one per replication.
    pub fn child(&self, suffix: impl fmt::Display) -> Self {
        Self::new(self.seed, format!("{}/{}", self.label, suffix))
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(fnv1a(self.label.as_bytes()));
        rng
    }
}

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in bytes {
        h ^= u64::from(*b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// Parameters of the truncated jump measure `c x^{-1-α} dx` on `(ε, ∞)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JumpMeasure {
    pub alpha: f64,
    pub c: f64,
    pub eps: f64,
}

impl JumpMeasure {
    pub fn new(alpha: f64, c: f64, eps: f64) -> Result<Self> {
        if !(alpha > 1.0 && alpha < 2.0) {
            return Err(invalid(format!("alpha must lie in (1,2), got {alpha}")));
        }
        if !(c > 0.0 && c.is_finite()) {
            return Err(invalid(format!("jump intensity must be positive, got {c}")));
        }
        if !(eps > 0.0 && eps < 1.0) {
            return Err(invalid(format!(
                "truncation level must lie in (0,1), got {eps}"
            )));
        }
        Ok(Self { alpha, c, eps })
    }

    /// Mass of `(ε, ∞)`, i.e. the jump rate per unit time.
    pub fn rate(&self) -> f64 {
        self.c * self.eps.powf(-self.alpha) / self.alpha
    }

    /// Jump size from the normalized tail, `ε U^{-1/α}`.
    pub fn draw_size<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let e: f64 = Exp1.sample(rng);
        self.eps * (e / self.alpha).exp()
    }
}

/// Jumps of the Poisson random measure in time order, generated lazily from
/// exponential spacings. Any prefix is a valid sample on the covered interval,
/// so extending the horizon never changes earlier atoms.
pub struct JumpStream {
    measure: JumpMeasure,
    rate: f64,
    rng: ChaCha8Rng,
    t: f64,
}

impl JumpStream {
    pub fn new(measure: JumpMeasure, stream: &SeededStream) -> Self {
        Self {
            measure,
            rate: measure.rate(),
            rng: stream.rng(),
            t: 0.0,
        }
    }
}

impl Iterator for JumpStream {
    type Item = (f64, f64);

    fn next(&mut self) -> Option<(f64, f64)> {
        let e: f64 = Exp1.sample(&mut self.rng);
        self.t += e / self.rate;
        Some((self.t, self.measure.draw_size(&mut self.rng)))
    }
}

/// Atoms of the Poisson random measure on `[0, T] × (ε, ∞)` with intensity
/// `dt × c x^{-1-α} dx`, sorted by time.
///
/// The count is Poisson with mean `T c ε^{-α}/α`; given the count, times are
/// uniform order statistics and sizes i.i.d. from the normalized tail.
pub fn stable_jump_ppm(
    alpha: f64,
    c: f64,
    horizon: f64,
    eps: f64,
    stream: &SeededStream,
) -> Result<Vec<(f64, f64)>> {
    let measure = JumpMeasure::new(alpha, c, eps)?;
    if !(horizon > 0.0 && horizon.is_finite()) {
        return Err(invalid(format!("horizon must be positive, got {horizon}")));
    }
    let mut rng = stream.rng();
    let mean = horizon * measure.rate();
    let count = poisson(&mut rng, mean)?;
    let mut times: Vec<f64> = (0..count).map(|_| rng.random::<f64>() * horizon).collect();
    times.sort_by(f64::total_cmp);
    Ok(times
        .into_iter()
        .map(|t| (t, measure.draw_size(&mut rng)))
        .collect())
}

pub(crate) fn poisson<R: Rng + ?Sized>(rng: &mut R, mean: f64) -> Result<u64> {
    if mean == 0.0 {
        return Ok(0);
    }
    let d = Poisson::new(mean).map_err(|e| invalid(format!("poisson mean {mean}: {e}")))?;
    let k: f64 = d.sample(rng);
    Ok(k as u64)
}
