//! Empirical distribution tools: ECDF, Kolmogorov–Smirnov distances, Hill
//! tail-index estimates and quantiles.

use serde::Serialize;

use crate::error::{invalid, Error, Result};

/// A sorted, non-empty sample with a free-form provenance tag.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EmpiricalSample {
    values: Vec<f64>,
    pub label: String,
}

impl EmpiricalSample {
    pub fn new(mut values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptySample);
        }
        if values.iter().any(|x| x.is_nan()) {
            return Err(invalid("sample contains NaN"));
        }
        values.sort_by(f64::total_cmp);
        Ok(Self {
            values,
            label: String::new(),
        })
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn sorted(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Fraction of values `≤ x`.
    pub fn ecdf(&self, x: f64) -> f64 {
        self.values.partition_point(|v| *v <= x) as f64 / self.len() as f64
    }

    /// Type-7 (linear interpolation) quantile.
    pub fn quantile(&self, p: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&p) {
            return Err(invalid(format!("quantile level {p} outside [0,1]")));
        }
        let h = (self.len() - 1) as f64 * p;
        let lo = h.floor() as usize;
        let hi = (lo + 1).min(self.len() - 1);
        Ok(self.values[lo] + (h - lo as f64) * (self.values[hi] - self.values[lo]))
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.len() as f64
    }

    /// `sup_x |F_n(x) − F(x)|` against a right-continuous CDF. At each
    /// distinct sample value both one-sided limits are compared, so CDFs with
    /// atoms are handled exactly.
    pub fn ks_distance(&self, cdf: impl Fn(f64) -> f64) -> f64 {
        let n = self.len() as f64;
        let mut d: f64 = 0.0;
        let mut i = 0;
        while i < self.values.len() {
            let x = self.values[i];
            let mut j = i;
            while j < self.values.len() && self.values[j] == x {
                j += 1;
            }
            let below = i as f64 / n;
            let at = j as f64 / n;
            d = d
                .max((at - cdf(x)).abs())
                .max((below - cdf(x.next_down())).abs());
            i = j;
        }
        d
    }

    /// Two-sample statistic `sup_x |F_n(x) − G_m(x)|`.
    pub fn ks_two_sample(&self, other: &EmpiricalSample) -> f64 {
        let (a, b) = (&self.values, &other.values);
        let (na, nb) = (a.len() as f64, b.len() as f64);
        let (mut i, mut j) = (0, 0);
        let mut d: f64 = 0.0;
        while i < a.len() && j < b.len() {
            let x = a[i].min(b[j]);
            while i < a.len() && a[i] <= x {
                i += 1;
            }
            while j < b.len() && b[j] <= x {
                j += 1;
            }
            d = d.max((i as f64 / na - j as f64 / nb).abs());
        }
        d
    }

    /// Hill estimate of the tail index from the `k` largest values.
    pub fn hill(&self, k: usize) -> Result<f64> {
        let n = self.len();
        if k == 0 || k >= n {
            return Err(invalid(format!(
                "Hill estimator needs 0 < k < n, got k={k}, n={n}"
            )));
        }
        let threshold = self.values[n - k - 1];
        if threshold <= 0.0 {
            return Err(invalid("Hill estimator needs positive order statistics"));
        }
        let mean_log = self.values[n - k..]
            .iter()
            .map(|x| (x / threshold).ln())
            .sum::<f64>()
            / k as f64;
        Ok(1.0 / mean_log)
    }
}

pub fn ecdf(sample: &[f64], x: f64) -> Result<f64> {
    if sample.is_empty() {
        return Err(Error::EmptySample);
    }
    Ok(sample.iter().filter(|v| **v <= x).count() as f64 / sample.len() as f64)
}

pub fn ks_distance(sample: &[f64], cdf: impl Fn(f64) -> f64) -> Result<f64> {
    Ok(EmpiricalSample::new(sample.to_vec())?.ks_distance(cdf))
}

pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<f64> {
    Ok(EmpiricalSample::new(a.to_vec())?.ks_two_sample(&EmpiricalSample::new(b.to_vec())?))
}

/// Asymptotic critical value of the one-sample statistic at significance
/// `level`, `sqrt(−ln(level/2)/2) / sqrt(n)`.
pub fn ks_critical(n: usize, level: f64) -> f64 {
    (-(level / 2.0).ln() / 2.0).sqrt() / (n as f64).sqrt()
}
