//! Exact simulation of the tandem queue in which job `i` needs service `v_i`
//! at both stations.
//!
//! The sojourn time at the second station is computed three ways: the Lindley
//! recursion, the running-maximum formula, and the plateau functional applied
//! to the cumulative input paths. The trajectory itself comes from a plain
//! event simulation and serves as a fourth reference.
//!
//! Indexing follows the model: job `n` is 1-based, and `X_0 = 0` for every
//! cumulative array.

use std::io::Write;

use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::paths::{fmt_f64, idle_h, plateau_f, StepPath};

/// Interarrival times `u` and service times `v`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TandemInputs {
    u: Vec<f64>,
    v: Vec<f64>,
}

impl TandemInputs {
    pub fn new(u: Vec<f64>, v: Vec<f64>) -> Result<Self> {
        if u.len() != v.len() {
            return Err(invalid(format!(
                "{} interarrival times but {} service times",
                u.len(),
                v.len()
            )));
        }
        if u.iter().any(|x| !(x.is_finite() && *x >= 0.0)) {
            return Err(invalid("interarrival times must be finite and nonnegative"));
        }
        if v.iter().any(|x| !(x.is_finite() && *x > 0.0)) {
            return Err(invalid("service times must be finite and positive"));
        }
        Ok(Self { u, v })
    }

    pub fn len(&self) -> usize {
        self.u.len()
    }

    pub fn is_empty(&self) -> bool {
        self.u.is_empty()
    }

    pub fn u(&self) -> &[f64] {
        &self.u
    }

    pub fn v(&self) -> &[f64] {
        &self.v
    }

    fn check_index(&self, n: usize) -> Result<()> {
        if n == 0 || n > self.len() {
            Err(Error::IndexOutOfRange {
                index: n,
                len: self.len(),
            })
        } else {
            Ok(())
        }
    }

    /// `U(t) = U_⌊t⌋`.
    pub fn arrival_path(&self) -> StepPath {
        StepPath::partial_sums(&self.u)
    }

    /// `V(t) = V_⌊t⌋`.
    pub fn work_path(&self) -> StepPath {
        StepPath::partial_sums(&self.v)
    }

    /// `I_n = u_1 + max_{k≤n} Σ_{j=2..k} (u_j − v_{j−1})`.
    pub fn idleness_closed_form(&self, n: usize) -> Result<f64> {
        self.check_index(n)?;
        Ok(self.idleness_closed_form_all()[n - 1])
    }

    /// [`Self::idleness_closed_form`] for every `n` in one pass.
    pub fn idleness_closed_form_all(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.len());
        let (mut partial, mut best) = (0.0_f64, 0.0_f64);
        for k in 0..self.len() {
            if k > 0 {
                partial += self.u[k] - self.v[k - 1];
                best = best.max(partial);
            }
            out.push(self.u[0] + best);
        }
        out
    }

    /// `I_n = H(U, V, 1)(n)`.
    pub fn idleness_via_h(&self, n: usize) -> Result<f64> {
        self.check_index(n)?;
        Ok(self.idleness_via_h_all()[n - 1])
    }

    pub fn idleness_via_h_all(&self) -> Vec<f64> {
        let h = idle_h(&self.arrival_path(), &self.work_path(), 1.0);
        (1..=self.len()).map(|k| h.at(k as f64)).collect()
    }

    /// Transfer times `V_m + H(U,V,1)(m)` for `m = 1..n`, the quantities whose
    /// count below `t` gives `R(t)` through `H`.
    pub fn transfer_times_via_h(&self) -> Vec<f64> {
        let cum_v = cumsum(&self.v);
        self.idleness_via_h_all()
            .into_iter()
            .zip(cum_v)
            .map(|(h, v)| v + h)
            .collect()
    }

    /// `M_1 = v_1`, `M_{n+1} = v_{n+1} + [M_n − d_{n+1}]^+` with
    /// `d_{n+1} = v_{n+1} + I_{n+1} − I_n`.
    pub fn sojourn_lindley(&self) -> Vec<f64> {
        let idle = event_idleness(&self.u, &self.v);
        let mut out: Vec<f64> = Vec::with_capacity(self.len());
        for n in 0..self.len() {
            let m = if n == 0 {
                self.v[0]
            } else {
                let d = self.v[n] + (idle[n] - idle[n - 1]);
                self.v[n] + (out[n - 1] - d).max(0.0)
            };
            out.push(m);
        }
        out
    }

    /// `M_n = max_{k≤n}(v_k + I_k) − I_n`.
    pub fn sojourn_maxformula(&self) -> Vec<f64> {
        let idle = self.idleness_closed_form_all();
        let mut best = f64::NEG_INFINITY;
        idle.iter()
            .zip(&self.v)
            .map(|(i, v)| {
                best = best.max(v + i);
                best - i
            })
            .collect()
    }

    /// `M_n = F(U, V, 1)(n)`.
    pub fn sojourn_functional(&self) -> Vec<f64> {
        let f = plateau_f(&self.arrival_path(), &self.work_path(), 1.0);
        (1..=self.len()).map(|k| f.at(k as f64)).collect()
    }
}

fn cumsum(xs: &[f64]) -> Vec<f64> {
    let mut acc = 0.0;
    xs.iter()
        .map(|x| {
            acc += x;
            acc
        })
        .collect()
}

/// Idleness of the first server at each arrival, by stepping through events.
fn event_idleness(u: &[f64], v: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(u.len());
    let (mut arrival, mut depart, mut idle) = (0.0, 0.0, 0.0);
    for (ui, vi) in u.iter().zip(v) {
        arrival += ui;
        // Arrival-first on ties: a job arriving exactly at a departure adds no idleness.
        idle += (arrival - depart).max(0.0);
        depart = f64::max(arrival, depart) + vi;
        out.push(idle);
    }
    out
}

/// All per-job quantities of one sample path plus exact continuous-time
/// queries.
#[derive(Debug, Clone, Serialize)]
pub struct TandemTrajectory {
    inputs: TandemInputs,
    cum_u: Vec<f64>,
    cum_v: Vec<f64>,
    idle: Vec<f64>,
    transfer: Vec<f64>,
    q2_departure: Vec<f64>,
    q2_idle: Vec<f64>,
    sojourn: Vec<f64>,
}

impl TandemTrajectory {
    pub fn build(inputs: TandemInputs) -> Self {
        let n = inputs.len();
        let cum_u = cumsum(&inputs.u);
        let cum_v = cumsum(&inputs.v);
        let mut idle = Vec::with_capacity(n);
        let mut transfer = Vec::with_capacity(n);
        let mut q2_departure = Vec::with_capacity(n);
        let mut q2_idle = Vec::with_capacity(n);
        let mut sojourn = Vec::with_capacity(n);
        let (mut i_prev, mut d_prev, mut g_prev, mut j_prev) = (0.0, 0.0, 0.0, 0.0);
        for k in 0..n {
            let i_k = i_prev + f64::max(0.0, cum_u[k] - d_prev);
            let d_k = cum_v[k] + i_k;
            let j_k = j_prev + f64::max(0.0, d_k - g_prev);
            let wait = f64::max(0.0, g_prev - d_k);
            let g_k = d_k + wait + inputs.v[k];
            idle.push(i_k);
            transfer.push(d_k);
            q2_idle.push(j_k);
            q2_departure.push(g_k);
            sojourn.push(wait + inputs.v[k]);
            (i_prev, d_prev, g_prev, j_prev) = (i_k, d_k, g_k, j_k);
        }
        Self {
            inputs,
            cum_u,
            cum_v,
            idle,
            transfer,
            q2_departure,
            q2_idle,
            sojourn,
        }
    }

    pub fn inputs(&self) -> &TandemInputs {
        &self.inputs
    }

    pub fn len(&self) -> usize {
        self.inputs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inputs.is_empty()
    }

    /// `U_1..U_n`.
    pub fn cum_u(&self) -> &[f64] {
        &self.cum_u
    }

    /// `V_1..V_n`.
    pub fn cum_v(&self) -> &[f64] {
        &self.cum_v
    }

    /// `I_1..I_n`.
    pub fn idle(&self) -> &[f64] {
        &self.idle
    }

    /// Transfer times `D_1..D_n`.
    pub fn transfer(&self) -> &[f64] {
        &self.transfer
    }

    /// Second-station departure times.
    pub fn q2_departure(&self) -> &[f64] {
        &self.q2_departure
    }

    /// Second-station idleness accrued by each transfer time.
    pub fn q2_idle(&self) -> &[f64] {
        &self.q2_idle
    }

    /// `M_1..M_n`.
    pub fn sojourn(&self) -> &[f64] {
        &self.sojourn
    }

    /// `E(t)`: number of arrivals in `[0, t]`.
    pub fn arrivals(&self, t: f64) -> usize {
        self.cum_u.partition_point(|x| *x <= t)
    }

    /// `R(t) = sup{n ≥ 0 : D_n ≤ t}`.
    pub fn arrivals_q2(&self, t: f64) -> usize {
        self.transfer.partition_point(|x| *x <= t)
    }

    fn at_index(xs: &[f64], k: usize) -> f64 {
        if k == 0 {
            0.0
        } else {
            xs[k - 1]
        }
    }

    /// `I(t)`, cumulative first-server idleness.
    pub fn idleness_at(&self, t: f64) -> f64 {
        let k = self.arrivals(t);
        Self::at_index(&self.idle, k) + (t - Self::at_index(&self.transfer, k)).max(0.0)
    }

    /// `W1(t) = V_{E(t)} − t + I(t)`, evaluated as `(D_{E(t)} − t)^+`: the
    /// first station drains until the last arrived job leaves. The literal
    /// sum cancels badly once `t` is large.
    pub fn w1(&self, t: f64) -> f64 {
        let k = self.arrivals(t);
        (Self::at_index(&self.transfer, k) - t).max(0.0)
    }

    /// `J(t)`, cumulative second-server idleness.
    pub fn q2_idleness_at(&self, t: f64) -> f64 {
        let k = self.arrivals_q2(t);
        Self::at_index(&self.q2_idle, k) + (t - Self::at_index(&self.q2_departure, k)).max(0.0)
    }

    /// `W2(t) = V_{R(t)} − t + J(t)`, evaluated as the workload found by
    /// the last transferred job drained at unit rate,
    /// `(M_{R(t)} − (t − D_{R(t)}))^+`. This keeps `W2(t) ≤ M(t)` exact in
    /// floating point.
    pub fn w2(&self, t: f64) -> f64 {
        self.drained(self.arrivals_q2(t), t)
    }

    /// `W2(t−)`: second-station workload just before `t`.
    pub fn w2_left(&self, t: f64) -> f64 {
        self.drained(self.transfer.partition_point(|x| *x < t), t)
    }

    fn drained(&self, k: usize, t: f64) -> f64 {
        if k == 0 {
            return 0.0;
        }
        (self.sojourn[k - 1] - (t - self.transfer[k - 1])).max(0.0)
    }

    /// `M(t) = M_{R(t)}` with `M_0 = 0`.
    pub fn plateau(&self, t: f64) -> f64 {
        Self::at_index(&self.sojourn, self.arrivals_q2(t))
    }

    /// The plateau process as a step path with breakpoints at the transfer
    /// times.
    pub fn plateau_path(&self) -> StepPath {
        StepPath::from_sorted(0.0, self.transfer.clone(), self.sojourn.clone())
    }

    /// Arrival, transfer and second-station departure times, merged with the
    /// origin. Empty when there are no jobs.
    pub fn event_grid(&self) -> Vec<f64> {
        if self.is_empty() {
            return Vec::new();
        }
        let mut g: Vec<f64> = std::iter::once(0.0)
            .chain(self.cum_u.iter().copied())
            .chain(self.transfer.iter().copied())
            .chain(self.q2_departure.iter().copied())
            .collect();
        g.sort_by(f64::total_cmp);
        g.dedup();
        g
    }

    /// Per-job table with columns `n,u,v,U,V,I,D,M`.
    pub fn write_jobs_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let err = |e: csv::Error| invalid(format!("csv write failed: {e}"));
        w.write_record(["n", "u", "v", "U", "V", "I", "D", "M"])
            .map_err(err)?;
        for k in 0..self.len() {
            let row = [
                (k + 1).to_string(),
                fmt_f64(self.inputs.u[k]),
                fmt_f64(self.inputs.v[k]),
                fmt_f64(self.cum_u[k]),
                fmt_f64(self.cum_v[k]),
                fmt_f64(self.idle[k]),
                fmt_f64(self.transfer[k]),
                fmt_f64(self.sojourn[k]),
            ];
            w.write_record(&row).map_err(err)?;
        }
        w.flush()
            .map_err(|e| invalid(format!("csv flush failed: {e}")))
    }

    /// Continuous-time table `t,W1,W2,M` on the event grid, optionally merged
    /// with a uniform grid of `extra_points` points over the busy horizon.
    pub fn write_time_csv<W: Write>(&self, out: W, extra_points: usize) -> Result<()> {
        let mut grid = self.event_grid();
        if extra_points > 0 && !grid.is_empty() {
            let end = grid.last().copied().unwrap_or(0.0);
            let step = end / extra_points as f64;
            grid.extend((0..=extra_points).map(|k| k as f64 * step));
            grid.sort_by(f64::total_cmp);
            grid.dedup();
        }
        let mut w = csv::Writer::from_writer(out);
        let err = |e: csv::Error| invalid(format!("csv write failed: {e}"));
        w.write_record(["t", "W1", "W2", "M"]).map_err(err)?;
        for t in grid {
            let row = [
                fmt_f64(t),
                fmt_f64(self.w1(t)),
                fmt_f64(self.w2(t)),
                fmt_f64(self.plateau(t)),
            ];
            w.write_record(&row).map_err(err)?;
        }
        w.flush()
            .map_err(|e| invalid(format!("csv flush failed: {e}")))
    }
}

/// `R(t)` as the number of entries of a nondecreasing transfer-time list that
/// are `≤ t`.
pub fn count_up_to(sorted: &[f64], t: f64) -> usize {
    sorted.partition_point(|x| *x <= t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::randomgen::{DistSpec, SeededStream};
    use proptest::prelude::*;

    fn inputs(u: &[f64], v: &[f64]) -> TandemInputs {
        TandemInputs::new(u.to_vec(), v.to_vec()).unwrap()
    }

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn saturated_first_station() {
        let t = TandemTrajectory::build(inputs(&[1.0; 3], &[2.0; 3]));
        assert_eq!(t.idle(), &[1.0, 1.0, 1.0]);
        assert_eq!(t.transfer(), &[3.0, 5.0, 7.0]);
        assert_eq!(t.sojourn(), &[2.0, 2.0, 2.0]);
    }

    #[test]
    fn every_job_finds_empty_system() {
        let t = TandemTrajectory::build(inputs(&[1.0; 3], &[0.5; 3]));
        assert_eq!(t.idle(), &[1.0, 1.5, 2.0]);
        assert_eq!(t.transfer(), &[1.5, 2.5, 3.5]);
        assert_eq!(t.sojourn(), &[0.5, 0.5, 0.5]);
    }

    #[test]
    fn single_job() {
        let t = TandemTrajectory::build(inputs(&[0.7], &[1.3]));
        assert_eq!(t.idle(), &[0.7]);
        assert_eq!(t.transfer(), &[0.7 + 1.3]);
        assert_eq!(t.sojourn(), &[1.3]);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(TandemInputs::new(vec![1.0], vec![]).is_err());
        assert!(TandemInputs::new(vec![-1.0], vec![1.0]).is_err());
        assert!(TandemInputs::new(vec![1.0], vec![0.0]).is_err());
    }

    #[test]
    fn idleness_examples() {
        let x = inputs(&[2.0; 3], &[1.0; 3]);
        assert_eq!(x.idleness_closed_form(3).unwrap(), 4.0);
        assert_eq!(x.idleness_via_h(3).unwrap(), 4.0);
        assert_eq!(x.idleness_closed_form(1).unwrap(), 2.0);
        assert!(matches!(
            x.idleness_closed_form(4),
            Err(Error::IndexOutOfRange { index: 4, len: 3 })
        ));
        assert!(x.idleness_via_h(0).is_err());

        let y = inputs(&[1.0; 3], &[2.0; 3]);
        for n in 1..=3 {
            assert_eq!(y.idleness_via_h(n).unwrap(), 1.0);
        }
    }

    #[test]
    fn arrivals_q2_examples() {
        let t = TandemTrajectory::build(inputs(&[1.0; 3], &[2.0; 3]));
        assert_eq!(t.arrivals_q2(2.9), 0);
        assert_eq!(t.arrivals_q2(5.0), 2);
        assert_eq!(count_up_to(&t.inputs().transfer_times_via_h(), 5.0), 2);
    }

    #[test]
    fn sojourn_examples() {
        let a = inputs(&[1.0; 3], &[2.0; 3]);
        assert_eq!(a.sojourn_lindley(), vec![2.0; 3]);
        assert_eq!(a.sojourn_maxformula(), vec![2.0; 3]);
        assert_eq!(a.sojourn_functional(), vec![2.0; 3]);

        let b = inputs(&[2.0; 3], &[1.0; 3]);
        assert_eq!(b.idleness_closed_form_all(), vec![2.0, 3.0, 4.0]);
        assert_eq!(b.sojourn_maxformula(), vec![1.0; 3]);
        assert_eq!(b.sojourn_lindley(), vec![1.0; 3]);

        let c = inputs(&[1.0, 1.0], &[1.0, 1.0]);
        assert_eq!(c.sojourn_functional(), vec![1.0, 1.0]);

        let d = inputs(&[5.0], &[0.25]);
        assert_eq!(d.sojourn_functional(), vec![0.25]);
        assert_eq!(d.sojourn_maxformula(), vec![0.25]);
    }

    #[test]
    fn plateau_path_examples() {
        let t = TandemTrajectory::build(inputs(&[1.0; 3], &[2.0; 3]));
        let p = t.plateau_path();
        assert_eq!(p.breakpoints(), &[3.0, 5.0, 7.0]);
        assert_eq!(p.values(), &[2.0, 2.0, 2.0]);
        assert_eq!(p.value_at_zero(), 0.0);

        let empty = TandemTrajectory::build(inputs(&[], &[]));
        assert_eq!(empty.plateau_path(), StepPath::constant(0.0));
    }

    #[test]
    fn workload_at_transfer_equals_sojourn() {
        let x = random_inputs(3, 2000, 1.0 / 3.1);
        let t = TandemTrajectory::build(x);
        for (d, m) in t.transfer().iter().zip(t.sojourn()) {
            assert_eq!(t.w2(*d), *m);
        }
    }

    #[test]
    fn workloads_match_idleness_form() {
        let t = TandemTrajectory::build(random_inputs(5, 3000, 1.0 / 3.1));
        let grid = t.event_grid();
        let scale = grid.last().unwrap().max(1.0);
        let probes = grid
            .iter()
            .copied()
            .chain(grid.windows(2).map(|w| 0.5 * (w[0] + w[1])));
        for s in probes {
            let v1 = TandemTrajectory::at_index(t.cum_v(), t.arrivals(s));
            let v2 = TandemTrajectory::at_index(t.cum_v(), t.arrivals_q2(s));
            assert!((t.w1(s) - (v1 - s + t.idleness_at(s))).abs() <= 1e-12 * scale);
            assert!((t.w2(s) - (v2 - s + t.q2_idleness_at(s))).abs() <= 1e-12 * scale);
        }
    }

    fn random_inputs(seed: u64, n: usize, rate: f64) -> TandemInputs {
        let u = DistSpec::exponential(rate)
            .unwrap()
            .sample(&SeededStream::new(seed, "u"), n);
        let v = DistSpec::pareto(1.0, 1.5)
            .unwrap()
            .sample(&SeededStream::new(seed, "v"), n);
        TandemInputs::new(u, v).unwrap()
    }

    #[test]
    fn figure_configuration_qualitative() {
        let t = TandemTrajectory::build(random_inputs(2024, 1000, 1.0 / 3.1));
        for s in t.event_grid() {
            assert!(t.plateau(s) >= t.w2(s), "t={s}");
            assert!(t.w1(s) >= 0.0 && t.w2(s) >= 0.0);
        }
        // M only changes at transfer times.
        let p = t.plateau_path();
        assert_eq!(p.breakpoints(), t.transfer());
    }

    #[test]
    fn ten_thousand_jobs_all_representations_agree() {
        for (seed, rate) in [(1, 1.0 / 3.1), (2, 1.0 / 2.9), (3, 1.0)] {
            let x = random_inputs(seed, 10_000, rate);
            let traj = TandemTrajectory::build(x.clone());
            let scale = traj.transfer().last().unwrap().max(1.0);
            let tol = 1e-9 * scale;
            assert!(close(&x.idleness_closed_form_all(), traj.idle(), tol));
            assert!(close(&x.idleness_via_h_all(), traj.idle(), tol));
            let lindley = x.sojourn_lindley();
            assert!(close(&lindley, traj.sojourn(), tol));
            assert!(close(&lindley, &x.sojourn_maxformula(), tol));
            assert!(close(&lindley, &x.sojourn_functional(), tol));
        }
    }

    fn arb_inputs() -> impl Strategy<Value = TandemInputs> {
        prop::collection::vec((0.0..4.0f64, 0.05..4.0f64), 1..60).prop_map(|jobs| {
            let (u, v) = jobs.into_iter().unzip();
            TandemInputs::new(u, v).unwrap()
        })
    }

    proptest! {
        #[test]
        fn three_way_sojourn_agreement(x in arb_inputs()) {
            let a = x.sojourn_lindley();
            prop_assert!(close(&a, &x.sojourn_maxformula(), 1e-9));
            prop_assert!(close(&a, &x.sojourn_functional(), 1e-9));
            prop_assert!(close(&a, TandemTrajectory::build(x).sojourn(), 1e-9));
        }

        #[test]
        fn idleness_representations_agree(x in arb_inputs()) {
            let t = TandemTrajectory::build(x.clone());
            prop_assert!(close(&x.idleness_closed_form_all(), t.idle(), 1e-9));
            prop_assert!(close(&x.idleness_via_h_all(), t.idle(), 1e-9));
            // Event-simulated I(U_n) from the continuous-time accessor.
            for (k, un) in t.cum_u().iter().enumerate() {
                prop_assert!((t.idleness_at(*un) - t.idle()[k]).abs() <= 1e-9);
            }
        }

        #[test]
        fn trajectory_structure(x in arb_inputs()) {
            let t = TandemTrajectory::build(x);
            for k in 0..t.len() {
                prop_assert_eq!(t.transfer()[k], t.cum_v()[k] + t.idle()[k]);
                prop_assert!(t.sojourn()[k] >= t.inputs().v()[k] - 1e-12);
                if k > 0 {
                    prop_assert!(t.transfer()[k] > t.transfer()[k - 1]);
                    prop_assert!(t.idle()[k] >= t.idle()[k - 1]);
                    prop_assert!(t.cum_u()[k] >= t.cum_u()[k - 1]);
                }
            }
        }

        #[test]
        fn plateau_dominates_workload(x in arb_inputs()) {
            let t = TandemTrajectory::build(x);
            for s in t.event_grid() {
                prop_assert!(t.plateau(s) >= t.w2(s));
                prop_assert!(t.w1(s) >= 0.0);
                prop_assert!(t.w2(s) >= 0.0);
            }
        }

        #[test]
        fn sojourn_equals_service_iff_empty_on_arrival(x in arb_inputs()) {
            let t = TandemTrajectory::build(x);
            for k in 0..t.len() {
                let empty = t.w2_left(t.transfer()[k]) <= 1e-9;
                let own = (t.sojourn()[k] - t.inputs().v()[k]).abs() <= 1e-9;
                prop_assert_eq!(empty, own);
            }
        }

        #[test]
        fn r_definition_matches_h_form(x in arb_inputs()) {
            let t = TandemTrajectory::build(x);
            let via_h = t.inputs().transfer_times_via_h();
            let end = t.transfer().last().unwrap() + 1.0;
            // Query times off the transfer instants, where both forms are
            // unambiguous.
            let grid = (0..997).map(|k| end * (k as f64 + 0.5) / 997.0);
            for s in grid {
                prop_assert_eq!(t.arrivals_q2(s), count_up_to(&via_h, s));
            }
        }
    }

    #[test]
    fn csv_exports() {
        let t = TandemTrajectory::build(inputs(&[1.0; 2], &[2.0; 2]));
        let mut buf = Vec::new();
        t.write_jobs_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text,
            "n,u,v,U,V,I,D,M\n1,1.0,2.0,1.0,2.0,1.0,3.0,2.0\n2,1.0,2.0,2.0,4.0,1.0,5.0,2.0\n"
        );
        let mut buf = Vec::new();
        t.write_time_csv(&mut buf, 4).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("t,W1,W2,M\n0.0,0.0,0.0,0.0\n"));

        let empty = TandemTrajectory::build(inputs(&[], &[]));
        let mut buf = Vec::new();
        empty.write_jobs_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "n,u,v,U,V,I,D,M\n");
        let mut buf = Vec::new();
        empty.write_time_csv(&mut buf, 10).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "t,W1,W2,M\n");
    }
}
