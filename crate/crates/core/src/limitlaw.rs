//! The explicit one-dimensional law of the time-changed limit plateau process.
//!
//! With jump measure `c_α x^{-1-α} dx` and Laplace exponent `s + s^α`:
//!
//! * `κ(q)` is the positive root of
//!   `q^{α-1} κ + κ^α = (c_α/α) E[exp(-κ T_α)]`, `T_α` Pareto(1, α);
//! * `h(q) = κ(q)/q` is the excursion-measure mass of excursions whose largest
//!   jump exceeds `q`, and equals `φ_q(β_q)` where `φ_q` inverts the killed
//!   exponent `Ψ̃_q` and `β_q = c_α q^{-α}/α`;
//! * `F_v(y) = exp(-∫_y^{y+v} κ(q)/q dq)`.
//!
//! `κ` is computed by bisection on the defining equation and, independently,
//! through `φ_q` by Brent's method; the two must agree.

use quadrature::double_exponential::integrate;
use roots::{find_root_brent, Convergency};
use serde::Serialize;

use crate::error::{invalid, Result};

/// `c_α = α(α−1)/Γ(2−α)`, the constant for which
/// `c_α ∫_0^∞ (e^{-sx} − 1 + sx) x^{-1-α} dx = s^α`.
pub fn c_alpha(alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    Ok(alpha * (alpha - 1.0) / libm::tgamma(2.0 - alpha))
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 1.0 && alpha < 2.0 {
        Ok(())
    } else {
        Err(invalid(format!("alpha must lie in (1,2), got {alpha}")))
    }
}

/// Parameters of the limit law.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LimitLawParams {
    pub alpha: f64,
    pub c: f64,
    /// Required residual of the root solvers.
    pub root_tol: f64,
    /// Quadrature target, relative to the size of the integrand.
    pub quad_tol: f64,
}

impl LimitLawParams {
    pub fn new(alpha: f64) -> Result<Self> {
        Ok(Self {
            alpha,
            c: c_alpha(alpha)?,
            root_tol: 1e-12,
            quad_tol: 1e-13,
        })
    }

    pub fn with_tolerances(mut self, root_tol: f64, quad_tol: f64) -> Result<Self> {
        if !(root_tol > 0.0 && quad_tol > 0.0) {
            return Err(invalid("tolerances must be positive"));
        }
        self.root_tol = root_tol;
        self.quad_tol = quad_tol;
        Ok(self)
    }

    /// `β_q = c_α q^{-α}/α`.
    pub fn beta(&self, q: f64) -> f64 {
        self.c * q.powf(-self.alpha) / self.alpha
    }

    /// `Ψ̃_q(s) = s + s^α + c_α ∫_q^∞ (1 − e^{-sx}) x^{-α-1} dx`.
    ///
    /// With `x = q/u` the integral is `q^{-α} ∫_0^1 (1 − e^{-sq/u}) u^{α-1} du`.
    pub fn psi_tilde(&self, q: f64, s: f64) -> f64 {
        if s == 0.0 {
            return 0.0;
        }
        let a = self.alpha;
        let sq = s * q;
        let f = |u: f64| -(-sq / u).exp_m1() * u.powf(a - 1.0);
        // Mass of the integrand sits near u = sq when that is below one.
        let scale = sq.min(1.0) / a;
        let tol = self.quad_tol * scale;
        let integral = if sq < 1.0 {
            integrate(f, 0.0, sq, tol).integral + integrate(f, sq, 1.0, tol).integral
        } else {
            integrate(f, 0.0, 1.0, tol).integral
        };
        s + s.powf(a) + self.c * q.powf(-a) * integral
    }

    /// `φ_q(λ)`: the `s ≥ 0` with `Ψ̃_q(s) = λ`.
    pub fn phi_q(&self, q: f64, lambda: f64) -> Result<f64> {
        if !(q > 0.0) {
            return Err(invalid(format!("q must be positive, got {q}")));
        }
        if !(lambda >= 0.0 && lambda.is_finite()) {
            return Err(invalid(format!(
                "phi_q needs a finite nonnegative level, got {lambda}"
            )));
        }
        if lambda == 0.0 {
            return Ok(0.0);
        }
        // Ψ̃_q(s) ≥ s, so the root lies in [0, λ].
        let mut conv = RelativeConvergency {
            rel: 1e-15,
            max_iter: 200,
        };
        find_root_brent(0.0, lambda, |s| self.psi_tilde(q, s) - lambda, &mut conv)
            .map_err(|e| invalid(format!("phi_q root search failed: {e:?}")))
    }

    /// `h(q) = φ_q(β_q)`.
    pub fn h_via_phi(&self, q: f64) -> Result<f64> {
        self.phi_q(q, self.beta(q))
    }

    /// `E[exp(-κ T_α)] = ∫_0^1 exp(-κ w^{-1/α}) dw`.
    ///
    /// With `w = u^α` this is `α ∫_0^1 e^{-κ/u} u^{α-1} du`, whose mass sits
    /// near `u = κ`.
    pub fn pareto_laplace(&self, kappa: f64) -> f64 {
        if kappa == 0.0 {
            return 1.0;
        }
        let a = self.alpha;
        let f = |u: f64| (-kappa / u).exp() * u.powf(a - 1.0);
        let tol = self.quad_tol * (-kappa).exp() / a;
        let integral = if kappa < 1.0 {
            integrate(f, 0.0, kappa, tol).integral + integrate(f, kappa, 1.0, tol).integral
        } else {
            integrate(f, 0.0, 1.0, tol).integral
        };
        a * integral
    }

    /// Left side minus right side of the defining equation of `κ(q)`. With
    /// `q = 0` the linear term is dropped.
    pub fn kappa_residual(&self, q: f64, kappa: f64) -> f64 {
        let a = self.alpha;
        let linear = if q == 0.0 {
            0.0
        } else {
            q.powf(a - 1.0) * kappa
        };
        linear + kappa.powf(a) - self.c / a * self.pareto_laplace(kappa)
    }

    /// `κ(q)` by bisection. `q = 0` gives the limit `κ₀`.
    pub fn kappa(&self, q: f64) -> Result<f64> {
        if !(q >= 0.0 && q.is_finite()) {
            return Err(invalid(format!("q must be nonnegative, got {q}")));
        }
        let g = |k: f64| self.kappa_residual(q, k);
        let (mut lo, mut hi) = (0.0, 1.0);
        while g(hi) <= 0.0 {
            lo = hi;
            hi *= 2.0;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if g(mid) > 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let (glo, ghi) = (g(lo).abs(), g(hi).abs());
        let root = if glo <= ghi { lo } else { hi };
        let residual = glo.min(ghi);
        if residual > self.root_tol {
            return Err(invalid(format!(
                "kappa({q}) residual {residual:e} above tolerance {:e}",
                self.root_tol
            )));
        }
        Ok(root)
    }

    pub fn kappa_zero(&self) -> Result<f64> {
        self.kappa(0.0)
    }

    /// `h(q) = κ(q)/q`.
    pub fn h(&self, q: f64) -> Result<f64> {
        if !(q > 0.0) {
            return Err(invalid(format!("q must be positive, got {q}")));
        }
        Ok(self.kappa(q)? / q)
    }

    /// `∫_y^{y+v} κ(q)/q dq` from direct `κ` solves, without caching.
    pub fn lambda_direct(&self, v: f64, y: f64) -> Result<f64> {
        check_lambda_args(v, y)?;
        if v == 0.0 {
            return Ok(0.0);
        }
        self.log_integral_direct(y.ln(), (y + v).ln())
    }

    /// `∫_a^b κ(e^x) dx`.
    fn log_integral_direct(&self, a: f64, b: f64) -> Result<f64> {
        if b <= a {
            return Ok(0.0);
        }
        let err = std::cell::Cell::new(None);
        let f = |x: f64| match self.kappa(x.exp()) {
            Ok(k) => k,
            Err(e) => {
                err.set(Some(e));
                0.0
            }
        };
        let out = integrate(f, a, b, 1e-12 * (b - a)).integral;
        match err.take() {
            Some(e) => Err(e),
            None => Ok(out),
        }
    }
}

fn check_lambda_args(v: f64, y: f64) -> Result<()> {
    if !(v >= 0.0 && v.is_finite()) {
        return Err(invalid(format!("v must be nonnegative, got {v}")));
    }
    if !(y > 0.0 && y.is_finite()) {
        return Err(invalid(format!("y must be positive, got {y}")));
    }
    Ok(())
}

/// Brent stopping rule with a relative bracket width.
struct RelativeConvergency {
    rel: f64,
    max_iter: usize,
}

impl Convergency<f64> for RelativeConvergency {
    fn is_root_found(&mut self, y: f64) -> bool {
        y == 0.0
    }

    fn is_converged(&mut self, x1: f64, x2: f64) -> bool {
        (x1 - x2).abs() <= self.rel * x1.abs().max(x2.abs()) || (x1 - x2).abs() < f64::MIN_POSITIVE
    }

    fn is_iteration_limit_reached(&mut self, iter: usize) -> bool {
        iter >= self.max_iter
    }
}

/// Monotone cubic Hermite interpolant on a uniform grid.
#[derive(Debug, Clone)]
struct Pchip {
    x0: f64,
    dx: f64,
    y: Vec<f64>,
    d: Vec<f64>,
}

impl Pchip {
    fn new(x0: f64, dx: f64, y: Vec<f64>) -> Self {
        let n = y.len();
        let delta: Vec<f64> = y.windows(2).map(|w| (w[1] - w[0]) / dx).collect();
        let mut d = vec![0.0; n];
        for i in 1..n - 1 {
            let (a, b) = (delta[i - 1], delta[i]);
            d[i] = if a * b <= 0.0 {
                0.0
            } else {
                2.0 / (1.0 / a + 1.0 / b)
            };
        }
        d[0] = end_slope(delta[0], delta[1.min(delta.len() - 1)]);
        d[n - 1] = end_slope(delta[n - 2], delta[n - 2 - 1.min(n - 2)]);
        Self { x0, dx, y, d }
    }

    fn cell(&self, x: f64) -> usize {
        (((x - self.x0) / self.dx).floor().max(0.0) as usize).min(self.y.len() - 2)
    }

    fn eval(&self, x: f64) -> f64 {
        let i = self.cell(x);
        self.eval_in(i, x)
    }

    fn eval_in(&self, i: usize, x: f64) -> f64 {
        let h = self.dx;
        let t = (x - (self.x0 + i as f64 * h)) / h;
        let (t2, t3) = (t * t, t * t * t);
        (2.0 * t3 - 3.0 * t2 + 1.0) * self.y[i]
            + (t3 - 2.0 * t2 + t) * h * self.d[i]
            + (-2.0 * t3 + 3.0 * t2) * self.y[i + 1]
            + (t3 - t2) * h * self.d[i + 1]
    }
}

fn end_slope(d0: f64, d1: f64) -> f64 {
    // Three-point end condition, clipped to keep the interpolant monotone.
    let s = 0.5 * (3.0 * d0 - d1);
    if s * d0 <= 0.0 {
        0.0
    } else if d0 * d1 <= 0.0 && s.abs() > 3.0 * d0.abs() {
        3.0 * d0
    } else {
        s
    }
}

/// `κ` tabulated in `(ln q, ln κ)` with the cumulative integral of
/// `κ(e^x) dx` per cell, so `λ(v, y)` costs two partial-cell quadratures.
#[derive(Debug, Clone)]
pub struct LimitLaw {
    params: LimitLawParams,
    interp: Pchip,
    cumulative: Vec<f64>,
}

impl LimitLaw {
    pub const Q_MIN: f64 = 1e-8;
    pub const Q_MAX: f64 = 1e8;
    const POINTS_PER_DECADE: usize = 64;

    pub fn new(params: LimitLawParams) -> Result<Self> {
        let (lo, hi) = (Self::Q_MIN.ln(), Self::Q_MAX.ln());
        let decades = (Self::Q_MAX / Self::Q_MIN).log10().round() as usize;
        let cells = decades * Self::POINTS_PER_DECADE;
        let dx = (hi - lo) / cells as f64;
        let logk = (0..=cells)
            .map(|i| Ok(params.kappa((lo + i as f64 * dx).exp())?.ln()))
            .collect::<Result<Vec<_>>>()?;
        let interp = Pchip::new(lo, dx, logk);
        let mut cumulative = Vec::with_capacity(cells + 1);
        cumulative.push(0.0);
        for i in 0..cells {
            let a = lo + i as f64 * dx;
            let piece = integrate(|x| interp.eval_in(i, x).exp(), a, a + dx, 1e-16).integral;
            cumulative.push(cumulative[i] + piece);
        }
        Ok(Self {
            params,
            interp,
            cumulative,
        })
    }

    pub fn for_alpha(alpha: f64) -> Result<Self> {
        Self::new(LimitLawParams::new(alpha)?)
    }

    pub fn params(&self) -> &LimitLawParams {
        &self.params
    }

    /// Interpolated `κ(q)`, falling back to a direct solve outside the table.
    pub fn kappa(&self, q: f64) -> Result<f64> {
        if (Self::Q_MIN..=Self::Q_MAX).contains(&q) {
            Ok(self.interp.eval(q.ln()).exp())
        } else {
            self.params.kappa(q)
        }
    }

    /// `∫_{x0}^{x} κ(e^s) ds` for `x` inside the table.
    fn cumulative_at(&self, x: f64) -> f64 {
        let i = self.interp.cell(x);
        let a = self.interp.x0 + i as f64 * self.interp.dx;
        if x == a {
            return self.cumulative[i];
        }
        let part = integrate(|s| self.interp.eval_in(i, s).exp(), a, x, 1e-16).integral;
        self.cumulative[i] + part
    }

    /// `λ(v, y) = ∫_y^{y+v} κ(q)/q dq`.
    pub fn lambda(&self, v: f64, y: f64) -> Result<f64> {
        check_lambda_args(v, y)?;
        if v == 0.0 {
            return Ok(0.0);
        }
        let (a, b) = (y.ln(), (y + v).ln());
        let (lo, hi) = (Self::Q_MIN.ln(), Self::Q_MAX.ln());
        let mut total = 0.0;
        if a < lo {
            total += self.params.log_integral_direct(a, b.min(lo))?;
        }
        let (ta, tb) = (a.max(lo), b.min(hi));
        if tb > ta {
            total += self.cumulative_at(tb) - self.cumulative_at(ta);
        }
        if b > hi {
            total += self.params.log_integral_direct(a.max(hi), b)?;
        }
        Ok(total)
    }

    /// `F_v(y) = P(Z(v) ≤ y)`.
    pub fn cdf(&self, v: f64, y: f64) -> Result<f64> {
        if !(v >= 0.0 && v.is_finite()) {
            return Err(invalid(format!("v must be nonnegative, got {v}")));
        }
        if y.is_nan() {
            return Err(invalid("y is NaN"));
        }
        if y < 0.0 {
            return Ok(0.0);
        }
        if v == 0.0 {
            return Ok(1.0);
        }
        if y == 0.0 {
            return Ok(0.0);
        }
        if y == f64::INFINITY {
            return Ok(1.0);
        }
        Ok((-self.lambda(v, y)?).exp())
    }
}
