//! Piecewise-constant càdlàg paths and the translation, idleness and plateau
//! functionals built on them.
//!
//! A [`StepPath`] is stored as a sorted list of breakpoints with the value the
//! path takes from each breakpoint onward, plus the value on
//! `[0, first breakpoint)`. Every operation here is exact on that
//! representation: suprema are finite maxima over the merged breakpoint grid.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Right-continuous step function on `[0, ∞)`.
///
/// The value at time `t` is the value attached to the last breakpoint `≤ t`, or
/// `v0` if there is none. A breakpoint at time zero is folded into `v0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepPath {
    breakpoints: Vec<f64>,
    values: Vec<f64>,
    v0: f64,
}

impl StepPath {
    pub fn new(v0: f64, breakpoints: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if breakpoints.len() != values.len() {
            return Err(invalid(format!(
                "{} breakpoints but {} values",
                breakpoints.len(),
                values.len()
            )));
        }
        if !v0.is_finite() || values.iter().any(|v| !v.is_finite()) {
            return Err(invalid("path values must be finite"));
        }
        if breakpoints.iter().any(|t| !t.is_finite() || *t < 0.0) {
            return Err(invalid("breakpoints must be finite and nonnegative"));
        }
        if breakpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(invalid("breakpoints must be strictly increasing"));
        }
        Ok(Self::from_sorted(v0, breakpoints, values))
    }

    /// Builds a path from already validated parts.
    pub(crate) fn from_sorted(
        mut v0: f64,
        mut breakpoints: Vec<f64>,
        mut values: Vec<f64>,
    ) -> Self {
        if breakpoints.first() == Some(&0.0) {
            v0 = values[0];
            breakpoints.remove(0);
            values.remove(0);
        }
        Self {
            breakpoints,
            values,
            v0,
        }
    }

    pub fn constant(value: f64) -> Self {
        Self {
            breakpoints: Vec::new(),
            values: Vec::new(),
            v0: value,
        }
    }

    /// `1_{[at, ∞)}`.
    pub fn indicator(at: f64) -> Result<Self> {
        Self::new(0.0, vec![at], vec![1.0])
    }

    /// Path of partial sums `t ↦ Σ_{i ≤ ⌊t⌋} increments[i-1]`, i.e. the
    /// job-indexed cumulative process with a breakpoint at every integer.
    pub fn partial_sums(increments: &[f64]) -> Self {
        let mut acc = 0.0;
        let mut breakpoints = Vec::with_capacity(increments.len());
        let mut values = Vec::with_capacity(increments.len());
        for (i, x) in increments.iter().enumerate() {
            acc += x;
            breakpoints.push((i + 1) as f64);
            values.push(acc);
        }
        Self {
            breakpoints,
            values,
            v0: 0.0,
        }
    }

    /// Path through the cumulative values `cumulative[k-1]` at integers `k`.
    pub fn from_integer_grid(cumulative: &[f64]) -> Self {
        Self {
            breakpoints: (1..=cumulative.len()).map(|k| k as f64).collect(),
            values: cumulative.to_vec(),
            v0: 0.0,
        }
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value_at_zero(&self) -> f64 {
        self.v0
    }

    pub fn len(&self) -> usize {
        self.breakpoints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.breakpoints.is_empty()
    }

    /// Value after the last breakpoint.
    pub fn terminal_value(&self) -> f64 {
        self.values.last().copied().unwrap_or(self.v0)
    }

    /// `p(t)`.
    pub fn eval(&self, t: f64) -> Result<f64> {
        check_time(t)?;
        Ok(self.at(t))
    }

    /// `p(t-)`, with `p(0-) = p(0)`.
    pub fn eval_left(&self, t: f64) -> Result<f64> {
        check_time(t)?;
        Ok(self.at_left(t))
    }

    pub(crate) fn at(&self, t: f64) -> f64 {
        let k = self.breakpoints.partition_point(|b| *b <= t);
        if k == 0 {
            self.v0
        } else {
            self.values[k - 1]
        }
    }

    pub(crate) fn at_left(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return self.v0;
        }
        let k = self.breakpoints.partition_point(|b| *b < t);
        if k == 0 {
            self.v0
        } else {
            self.values[k - 1]
        }
    }

    /// Size of the jump at `t`, `p(t) - p(t-)`.
    pub fn jump_at(&self, t: f64) -> f64 {
        self.at(t) - self.at_left(t)
    }

    /// `t ↦ sup_{0≤s≤t} p(s)`.
    pub fn running_sup(&self) -> StepPath {
        let mut best = self.v0;
        let values = self
            .values
            .iter()
            .map(|v| {
                best = best.max(*v);
                best
            })
            .collect();
        StepPath {
            breakpoints: self.breakpoints.clone(),
            values,
            v0: self.v0,
        }
    }

    /// `t ↦ p(n t) / a`.
    pub fn scale(&self, a: f64, n: f64) -> Result<StepPath> {
        if !(a > 0.0 && a.is_finite()) || !(n > 0.0 && n.is_finite()) {
            return Err(invalid(format!(
                "scale factors must be positive, got a={a}, n={n}"
            )));
        }
        Ok(StepPath {
            breakpoints: self.breakpoints.iter().map(|t| t / n).collect(),
            values: self.values.iter().map(|v| v / a).collect(),
            v0: self.v0 / a,
        })
    }

    /// Pointwise combination of two paths on their merged breakpoint grid.
    /// Coinciding breakpoints collapse into one.
    pub fn zip_with(&self, other: &StepPath, f: impl Fn(f64, f64) -> f64) -> StepPath {
        let (a, b) = (&self.breakpoints, &other.breakpoints);
        let mut breakpoints = Vec::with_capacity(a.len() + b.len());
        let mut values = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        let (mut va, mut vb) = (self.v0, other.v0);
        while i < a.len() || j < b.len() {
            let ta = a.get(i).copied().unwrap_or(f64::INFINITY);
            let tb = b.get(j).copied().unwrap_or(f64::INFINITY);
            let t = ta.min(tb);
            if ta == t {
                va = self.values[i];
                i += 1;
            }
            if tb == t {
                vb = other.values[j];
                j += 1;
            }
            breakpoints.push(t);
            values.push(f(va, vb));
        }
        StepPath {
            breakpoints,
            values,
            v0: f(self.v0, other.v0),
        }
    }

    pub fn sub(&self, other: &StepPath) -> StepPath {
        self.zip_with(other, |x, y| x - y)
    }

    pub fn add(&self, other: &StepPath) -> StepPath {
        self.zip_with(other, |x, y| x + y)
    }

    /// Drops breakpoints that do not change the value.
    pub fn canonical(&self) -> StepPath {
        let mut prev = self.v0;
        let mut breakpoints = Vec::new();
        let mut values = Vec::new();
        for (t, v) in self.breakpoints.iter().zip(&self.values) {
            if *v != prev {
                breakpoints.push(*t);
                values.push(*v);
                prev = *v;
            }
        }
        StepPath {
            breakpoints,
            values,
            v0: self.v0,
        }
    }

    /// Equality up to `tol` per value, ignoring redundant breakpoints.
    pub fn approx_eq(&self, other: &StepPath, tol: f64) -> bool {
        let d = self.zip_with(other, |x, y| (x - y).abs());
        d.v0 <= tol && d.values.iter().all(|v| *v <= tol)
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let io = |e: csv::Error| invalid(format!("csv write failed: {e}"));
        w.write_record(["t", "value"]).map_err(io)?;
        w.write_record([fmt_f64(0.0), fmt_f64(self.v0)])
            .map_err(io)?;
        for (t, v) in self.breakpoints.iter().zip(&self.values) {
            w.write_record([fmt_f64(*t), fmt_f64(*v)]).map_err(io)?;
        }
        w.flush()
            .map_err(|e| invalid(format!("csv flush failed: {e}")))
    }

    /// Reads the `(t, value)` layout written by [`StepPath::write_csv`].
    pub fn read_csv<R: Read>(input: R) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(input);
        let mut rows = Vec::new();
        for rec in rdr.records() {
            let rec = rec.map_err(|e| invalid(format!("csv read failed: {e}")))?;
            let parse = |i: usize| -> Result<f64> {
                let s = rec.get(i).unwrap_or("");
                s.trim().parse().map_err(|_| Error::Parse {
                    what: "path csv field",
                    input: s.to_string(),
                })
            };
            rows.push((parse(0)?, parse(1)?));
        }
        let Some(&(t0, v0)) = rows.first() else {
            return Err(Error::EmptySample);
        };
        if t0 != 0.0 {
            return Err(invalid("first csv row must be at t=0"));
        }
        let (breakpoints, values) = rows[1..].iter().copied().unzip();
        Self::new(v0, breakpoints, values)
    }
}

pub(crate) fn fmt_f64(x: f64) -> String {
    // Shortest round-trip representation keeps outputs byte-stable.
    format!("{x:?}")
}

fn check_time(t: f64) -> Result<()> {
    if t < 0.0 || t.is_nan() {
        Err(Error::NegativeTime(t))
    } else {
        Ok(())
    }
}

/// Translation `G(x, c)(t) = x([t - c]^+)`.
pub fn translate_g(x: &StepPath, c: f64) -> StepPath {
    if c >= 0.0 {
        return StepPath {
            breakpoints: x.breakpoints.iter().map(|t| t + c).collect(),
            values: x.values.clone(),
            v0: x.v0,
        };
    }
    // Negative shift: everything at or before -c lands on [0, ...).
    let shift = -c;
    let k = x.breakpoints.partition_point(|b| *b <= shift);
    let v0 = if k == 0 { x.v0 } else { x.values[k - 1] };
    StepPath {
        breakpoints: x.breakpoints[k..].iter().map(|t| t - shift).collect(),
        values: x.values[k..].to_vec(),
        v0,
    }
}

/// Idleness functional `H(x, y, c) = (x - G(y, c))^↑`.
pub fn idle_h(x: &StepPath, y: &StepPath, c: f64) -> StepPath {
    x.sub(&translate_g(y, c)).running_sup()
}

/// Plateau functional
/// `F(x, y, c)(t) = sup_{s≤t}(y(s) - y(s-) + H(x,y,c)(s)) - H(x,y,c)(t)`.
///
/// The jump term is nonzero only at breakpoints of `y` and `H` is a step
/// path, so the supremum is a running maximum over the merged grid. At `s=0`
/// the jump term vanishes (`y(0-) = y(0)`), hence `F(0) = 0`.
pub fn plateau_f(x: &StepPath, y: &StepPath, c: f64) -> StepPath {
    let h = idle_h(x, y, c);
    // y tagged with its own left limits so the merge sees each jump once.
    let mut jumps = Vec::with_capacity(y.len());
    let mut prev = y.v0;
    for v in &y.values {
        jumps.push(v - prev);
        prev = *v;
    }

    let (hb, yb) = (&h.breakpoints, &y.breakpoints);
    let mut breakpoints = Vec::with_capacity(hb.len() + yb.len());
    let mut values = Vec::with_capacity(hb.len() + yb.len());
    let (mut i, mut j) = (0, 0);
    let mut h_now = h.v0;
    let mut best = h.v0;
    while i < hb.len() || j < yb.len() {
        let th = hb.get(i).copied().unwrap_or(f64::INFINITY);
        let ty = yb.get(j).copied().unwrap_or(f64::INFINITY);
        let t = th.min(ty);
        if th == t {
            h_now = h.values[i];
            i += 1;
        }
        best = best.max(h_now);
        if ty == t {
            best = best.max(jumps[j] + h_now);
            j += 1;
        }
        breakpoints.push(t);
        values.push(best - h_now);
    }
    StepPath {
        breakpoints,
        values,
        v0: 0.0,
    }
}

/// Largest pointwise gap between two step paths, evaluated away from
/// breakpoints.
///
/// Breakpoints of the two paths closer than `time_tol` (relative to their
/// magnitude) are treated as the same instant, so paths built through
/// different floating-point routes are compared on the intervals where both
/// are constant.
pub fn sup_distance(a: &StepPath, b: &StepPath, time_tol: f64) -> f64 {
    let mut grid: Vec<f64> = a
        .breakpoints
        .iter()
        .chain(&b.breakpoints)
        .copied()
        .collect();
    grid.sort_by(f64::total_cmp);
    let mut clusters: Vec<(f64, f64)> = Vec::new();
    for t in grid {
        match clusters.last_mut() {
            Some((_, hi)) if t - *hi <= time_tol * t.abs().max(1.0) => *hi = t,
            _ => clusters.push((t, t)),
        }
    }
    let mut probes = Vec::with_capacity(clusters.len() + 1);
    match clusters.first() {
        Some((lo, _)) if *lo > time_tol => probes.push(0.0),
        None => probes.push(0.0),
        _ => {}
    }
    for w in clusters.windows(2) {
        probes.push(0.5 * (w[0].1 + w[1].0));
    }
    if let Some((_, hi)) = clusters.last() {
        probes.push(hi + 1.0);
    }
    probes
        .into_iter()
        .map(|t| (a.at(t) - b.at(t)).abs())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn path(v0: f64, steps: &[(f64, f64)]) -> StepPath {
        StepPath::new(
            v0,
            steps.iter().map(|s| s.0).collect(),
            steps.iter().map(|s| s.1).collect(),
        )
        .unwrap()
    }

    #[test]
    fn eval_is_right_continuous() {
        let p = StepPath::indicator(1.0).unwrap();
        assert_eq!(p.eval(1.0).unwrap(), 1.0);
        assert_eq!(p.eval(0.999).unwrap(), 0.0);
        let q = path(0.0, &[(1.0, 2.0), (2.0, 5.0)]);
        assert_eq!(q.eval(3.0).unwrap(), 5.0);
        assert!(matches!(p.eval(-0.1), Err(Error::NegativeTime(_))));
    }

    #[test]
    fn eval_left_limits() {
        let p = StepPath::indicator(1.0).unwrap();
        assert_eq!(p.eval_left(1.0).unwrap(), 0.0);
        assert_eq!(p.eval_left(0.0).unwrap(), 0.0);
        assert_eq!(p.eval_left(1.5).unwrap(), 1.0);
        assert!(p.eval_left(-1.0).is_err());
    }

    #[test]
    fn breakpoint_at_zero_is_folded() {
        let p = path(7.0, &[(0.0, 3.0), (1.0, 4.0)]);
        assert_eq!(p.value_at_zero(), 3.0);
        assert_eq!(p.eval_left(0.0).unwrap(), 3.0);
        assert_eq!(p.jump_at(0.0), 0.0);
        assert_eq!(p.len(), 1);
    }

    #[test]
    fn rejects_malformed_paths() {
        assert!(StepPath::new(0.0, vec![2.0, 1.0], vec![1.0, 2.0]).is_err());
        assert!(StepPath::new(0.0, vec![1.0, 1.0], vec![1.0, 2.0]).is_err());
        assert!(StepPath::new(0.0, vec![-1.0], vec![1.0]).is_err());
        assert!(StepPath::new(0.0, vec![1.0], vec![]).is_err());
        assert!(StepPath::new(f64::NAN, vec![], vec![]).is_err());
    }

    #[test]
    fn running_sup_examples() {
        let p = path(0.0, &[(1.0, 3.0), (2.0, 1.0), (3.0, 5.0)]);
        let s = p.running_sup();
        assert_eq!(s.values(), &[3.0, 3.0, 5.0]);
        assert_eq!(s.value_at_zero(), 0.0);
        let mono = path(0.0, &[(1.0, 1.0), (2.0, 2.0)]);
        assert_eq!(mono.running_sup(), mono);
    }

    #[test]
    fn translate_examples() {
        let x = StepPath::indicator(1.0).unwrap();
        assert_eq!(translate_g(&x, 0.0), x);
        assert!(translate_g(&x, 1.0).approx_eq(&StepPath::indicator(2.0).unwrap(), 0.0));
        // Negative shifts pull the path toward the origin.
        let y = path(0.0, &[(1.0, 1.0), (3.0, 2.0)]);
        let g = translate_g(&y, -2.0);
        assert_eq!(g.value_at_zero(), 1.0);
        assert_eq!(g.eval(1.0).unwrap(), 2.0);
    }

    #[test]
    fn idle_h_examples() {
        let one = StepPath::indicator(1.0).unwrap();
        let x = one.add(&StepPath::indicator(2.0).unwrap());
        let h = idle_h(&x, &one, 0.0);
        assert!(h.approx_eq(&StepPath::indicator(2.0).unwrap(), 0.0));

        let zero = StepPath::constant(0.0);
        let y = path(0.0, &[(0.5, 1.0), (2.0, 4.0)]);
        for c in [0.0, 0.3, 2.0] {
            assert!(idle_h(&zero, &y, c).approx_eq(&zero, 0.0));
        }

        // U, V for u = (2,2,2), v = (1,1,1): I_3 = 2 + max(0, 1, 2) = 4.
        let u = StepPath::partial_sums(&[2.0, 2.0, 2.0]);
        let v = StepPath::partial_sums(&[1.0, 1.0, 1.0]);
        assert_eq!(idle_h(&u, &v, 1.0).eval(3.0).unwrap(), 4.0);
    }

    #[test]
    fn plateau_counterexample() {
        let one = StepPath::indicator(1.0).unwrap();
        let x = one.add(&StepPath::indicator(2.0).unwrap());
        let f = plateau_f(&x, &one, 0.0);
        let expected = path(0.0, &[(1.0, 1.0), (2.0, 0.0)]);
        assert!(f.approx_eq(&expected, 0.0));
        assert_eq!(f.canonical(), expected);
    }

    #[test]
    fn plateau_vanishes_without_jumps() {
        let x = path(0.0, &[(0.5, 2.0), (1.5, -1.0), (4.0, 3.0)]);
        let f = plateau_f(&x, &StepPath::constant(0.0), 0.7);
        assert!(f.approx_eq(&StepPath::constant(0.0), 0.0));
    }

    #[test]
    fn scale_examples() {
        let p = path(1.0, &[(1.0, 3.0)]);
        assert_eq!(p.scale(1.0, 1.0).unwrap(), p);
        let q = StepPath::indicator(2.0).unwrap().scale(2.0, 4.0).unwrap();
        assert!(q.approx_eq(&path(0.0, &[(0.5, 0.5)]), 0.0));
        assert!(p.scale(0.0, 1.0).is_err());
        assert!(p.scale(1.0, -2.0).is_err());
    }

    #[test]
    fn csv_and_json_layouts() {
        let p = path(0.5, &[(1.0, 2.0), (2.5, -1.0)]);
        let mut buf = Vec::new();
        p.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert_eq!(text, "t,value\n0.0,0.5\n1.0,2.0\n2.5,-1.0\n");
        assert_eq!(StepPath::read_csv(buf.as_slice()).unwrap(), p);

        let json = serde_json::to_value(&p).unwrap();
        assert_eq!(json["v0"], 0.5);
        assert_eq!(json["breakpoints"], serde_json::json!([1.0, 2.5]));
        let back: StepPath = serde_json::from_value(json).unwrap();
        assert_eq!(back, p);
    }

    #[test]
    fn sup_distance_ignores_rounding_of_breakpoints() {
        let a = path(0.0, &[(1.0, 1.0), (2.0, 3.0)]);
        let b = path(0.0, &[(1.0 + 1e-15, 1.0), (2.0, 3.0)]);
        assert_eq!(sup_distance(&a, &b, 1e-12), 0.0);
        let c = path(0.0, &[(1.0, 1.0), (2.0, 3.5)]);
        assert_eq!(sup_distance(&a, &c, 1e-12), 0.5);
    }

    // --- brute-force oracles over the merged breakpoint grid ---

    fn grid_of(paths: &[&StepPath]) -> Vec<f64> {
        let mut g: Vec<f64> = std::iter::once(0.0)
            .chain(paths.iter().flat_map(|p| p.breakpoints().iter().copied()))
            .collect();
        g.sort_by(f64::total_cmp);
        g.dedup();
        g
    }

    fn brute_sup(p: &StepPath, t: f64) -> f64 {
        grid_of(&[p])
            .into_iter()
            .filter(|s| *s <= t)
            .map(|s| p.at(s))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Probe points: every grid point and the midpoint of every gap, so each
    /// constancy interval is visited away from rounded breakpoints.
    fn probes(grid: &[f64]) -> Vec<f64> {
        let mut out = grid.to_vec();
        out.extend(grid.windows(2).map(|w| 0.5 * (w[0] + w[1])));
        if let Some(last) = grid.last() {
            out.push(last + 1.0);
        }
        out.sort_by(f64::total_cmp);
        out
    }

    fn full_grid(x: &StepPath, y: &StepPath, c: f64) -> Vec<f64> {
        let mut grid = grid_of(&[x, y]);
        grid.extend(y.breakpoints().iter().map(|b| b + c).filter(|b| *b >= 0.0));
        grid.sort_by(f64::total_cmp);
        grid.dedup();
        grid
    }

    fn brute_h(x: &StepPath, y: &StepPath, c: f64, t: f64) -> f64 {
        probes(&full_grid(x, y, c))
            .into_iter()
            .filter(|s| *s <= t)
            .chain(std::iter::once(t))
            .map(|s| x.at(s) - y.at((s - c).max(0.0)))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    fn brute_f(x: &StepPath, y: &StepPath, c: f64, t: f64) -> f64 {
        let outer = probes(&full_grid(x, y, c))
            .into_iter()
            .filter(|s| *s <= t)
            .chain(std::iter::once(t))
            .map(|s| y.jump_at(s) + brute_h(x, y, c, s))
            .fold(f64::NEG_INFINITY, f64::max);
        outer - brute_h(x, y, c, t)
    }

    fn arb_path(max_len: usize) -> impl Strategy<Value = StepPath> {
        (
            -5.0..5.0f64,
            prop::collection::vec((0.01..3.0f64, -5.0..5.0f64), 0..max_len),
        )
            .prop_map(|(v0, steps)| {
                let mut t = 0.0;
                let (mut bs, mut vs) = (Vec::new(), Vec::new());
                for (dt, v) in steps {
                    t += dt;
                    bs.push(t);
                    vs.push(v);
                }
                StepPath::new(v0, bs, vs).unwrap()
            })
    }

    fn arb_nondecreasing(max_len: usize) -> impl Strategy<Value = StepPath> {
        prop::collection::vec((0.01..3.0f64, 0.0..4.0f64), 0..max_len).prop_map(|steps| {
            let (mut t, mut acc) = (0.0, 0.0);
            let (mut bs, mut vs) = (Vec::new(), Vec::new());
            for (dt, dv) in steps {
                t += dt;
                acc += dv;
                bs.push(t);
                vs.push(acc);
            }
            StepPath::new(0.0, bs, vs).unwrap()
        })
    }

    proptest! {
        #[test]
        fn running_sup_matches_brute_force(p in arb_path(20)) {
            let s = p.running_sup();
            for t in grid_of(&[&p]) {
                prop_assert_eq!(s.at(t), brute_sup(&p, t));
            }
        }

        #[test]
        fn running_sup_is_idempotent(p in arb_path(20)) {
            let s = p.running_sup();
            prop_assert_eq!(s.running_sup(), s);
        }

        #[test]
        fn translate_by_zero_is_identity(p in arb_path(20)) {
            prop_assert_eq!(translate_g(&p, 0.0), p);
        }

        #[test]
        fn translate_matches_pointwise(p in arb_path(20), c in -2.0..2.0f64) {
            let g = translate_g(&p, c);
            for k in 0..400 {
                let t = k as f64 * 0.1 + 0.013;
                prop_assert_eq!(g.at(t), p.at((t - c).max(0.0)));
            }
        }

        #[test]
        fn plateau_matches_double_supremum(x in arb_path(30), y in arb_path(30), c in prop::sample::select(vec![0.0, 1.0])) {
            let f = plateau_f(&x, &y, c);
            let grid = full_grid(&x, &y, c);
            // Midpoints only: at a translated breakpoint b + c the rounded sum
            // may land on either side of the pointwise definition.
            for t in grid.windows(2).map(|w| 0.5 * (w[0] + w[1])) {
                let want = brute_f(&x, &y, c, t);
                prop_assert!((f.at(t) - want).abs() <= 1e-12, "t={} got {} want {}", t, f.at(t), want);
            }
        }

        #[test]
        fn plateau_nonnegative_for_nondecreasing_y(x in arb_path(25), y in arb_nondecreasing(25), c in 0.0..2.0f64) {
            let f = plateau_f(&x, &y, c);
            prop_assert!(f.value_at_zero() >= 0.0);
            prop_assert!(f.values().iter().all(|v| *v >= 0.0));
        }

        #[test]
        fn idle_h_commutes_with_scaling(
            x in arb_path(25), y in arb_path(25), c in 0.0..3.0f64,
            a in 0.1..50.0f64, n in 0.1..50.0f64,
        ) {
            // a^{-1} H(x,y,c)(n t) = H(x^n, y^n, c/n)(t)
            let lhs = idle_h(&x, &y, c).scale(a, n).unwrap();
            let rhs = idle_h(&x.scale(a, n).unwrap(), &y.scale(a, n).unwrap(), c / n);
            let mag = x.values().iter().chain(y.values()).fold(x.value_at_zero().abs().max(y.value_at_zero().abs()), |m, v| m.max(v.abs())) / a;
            prop_assert!(sup_distance(&lhs, &rhs, 1e-12) <= 1e-12 * mag.max(1.0));
        }
    }
}
