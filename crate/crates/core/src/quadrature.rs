//! Beta-type integrals `∫_0^1 x^{p-1} (1-x^n)^{m/n-1} dx`.
//!
//! Both routes start from the substitution `t = x^n`, which turns the integral
//! into `(1/n) ∫_0^1 t^{u-1} (1-t)^{v-1} dt` with `u = p/n`, `v = m/n`. From
//! there the closed-form route evaluates `B(u, v)/n` from [`lgamma_oracle`],
//! and the transformed route runs tanh-sinh quadrature on the substituted
//! integrand. The transformed route works entirely in log space and never
//! forms `t` or `1 - t` directly, so the endpoint singularities are never
//! sampled.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::products::ProductParams;
use crate::sum::CompensatedSum;

/// Which evaluation path produced a [`QuadratureResult`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    /// Double-exponential quadrature after the `t = x^n` substitution.
    Transformed,
    /// `B(p/n, m/n)/n` through the log-gamma oracle.
    ClosedForm,
}

impl std::str::FromStr for Route {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "transformed" => Ok(Route::Transformed),
            "closed" | "closed_form" | "closed-form" => Ok(Route::ClosedForm),
            other => Err(Error::validation(format!(
                "unknown quadrature route {other:?} (expected transformed or closed)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadratureResult {
    pub value: f64,
    pub error_estimate: f64,
    pub evaluations: u64,
    pub route: Route,
}

/// The single integral `∫_0^1 x^{p-1} (1-x^n)^{m/n-1} dx`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BetaIntegral {
    p: f64,
    m: f64,
    n: f64,
}

impl BetaIntegral {
    pub fn new(p: f64, m: f64, n: f64) -> Result<Self> {
        if !(p.is_finite() && m.is_finite() && n.is_finite()) {
            return Err(Error::validation("integral parameters must be finite"));
        }
        if m <= 0.0 {
            return Err(Error::domain(format!(
                "m = {m} makes the singularity at x = 1 non-integrable"
            )));
        }
        if p <= 0.0 {
            return Err(Error::domain(format!(
                "p = {p} makes the singularity at x = 0 non-integrable"
            )));
        }
        if n <= 0.0 {
            return Err(Error::validation(format!("n must be positive, got {n}")));
        }
        if m > n {
            return Err(Error::validation(format!("m/n must not exceed 1, got {m}/{n}")));
        }
        Ok(Self { p, m, n })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn m(&self) -> f64 {
        self.m
    }

    pub fn n(&self) -> f64 {
        self.n
    }

    /// Exponents `(u, v)` of `t^{u-1} (1-t)^{v-1}` after `t = x^n`.
    fn beta_exponents(&self) -> (f64, f64) {
        (self.p / self.n, self.m / self.n)
    }
}

/// The four parameters `(p, q, m, n)` of a ratio of two Beta-type integrals
/// sharing `m` and `n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GeneralBetaSpec {
    pub p: f64,
    pub q: f64,
    pub m: f64,
    pub n: f64,
}

impl GeneralBetaSpec {
    pub fn new(p: f64, q: f64, m: f64, n: f64) -> Result<Self> {
        BetaIntegral::new(p, m, n)?;
        BetaIntegral::new(q, m, n)?;
        Ok(Self { p, q, m, n })
    }

    /// The parameter set whose ratio is the Wallis-type product of `(a, b)`:
    /// `q = a`, `p = a + b`, `m = b`, `n = 2b`.
    pub fn from_params(params: ProductParams) -> Self {
        let (a, b) = (params.a(), params.b());
        Self {
            p: a + b,
            q: a,
            m: b,
            n: 2.0 * b,
        }
    }

    /// `∫ x^{p-1} (1-x^n)^{m/n-1}`.
    pub fn numerator(&self) -> BetaIntegral {
        BetaIntegral {
            p: self.p,
            m: self.m,
            n: self.n,
        }
    }

    /// `∫ x^{q-1} (1-x^n)^{m/n-1}`.
    pub fn denominator(&self) -> BetaIntegral {
        BetaIntegral {
            p: self.q,
            m: self.m,
            n: self.n,
        }
    }
}

/// Settings for the transformed route.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TanhSinhConfig {
    /// Total integrand evaluations allowed across all levels.
    pub max_evaluations: u64,
    /// Two successive levels must agree to this relative tolerance.
    pub rel_tol: f64,
}

impl Default for TanhSinhConfig {
    fn default() -> Self {
        Self {
            max_evaluations: 1 << 13,
            rel_tol: 1e-12,
        }
    }
}

// ---------------------------------------------------------------------------
// log-gamma oracle

const HALF_LN_2PI: f64 = 0.918_938_533_204_672_8;

/// `B_{2j} / (2j (2j-1))` for j = 1..=8.
const STIRLING: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360_360.0,
    1.0 / 156.0,
    -3617.0 / 122_400.0,
];

/// Below this the argument is shifted up before the asymptotic series is used.
const STIRLING_THRESHOLD: f64 = 12.0;

/// `ln Γ(z)` together with a rounding-error bound.
fn lgamma_with_bound(z: f64) -> Result<(f64, f64)> {
    if z.is_nan() || z <= 0.0 || z.is_infinite() {
        return Err(Error::domain(format!("log-gamma needs a finite z > 0, got {z}")));
    }
    let (x, log_shift, shift_bound) = if z < STIRLING_THRESHOLD {
        let steps = (STIRLING_THRESHOLD - z).ceil() as u32;
        let prod: f64 = (0..steps).map(|j| z + j as f64).product();
        let ln_prod = prod.ln();
        (
            z + steps as f64,
            ln_prod,
            f64::EPSILON * (steps as f64 + 2.0 + ln_prod.abs()),
        )
    } else {
        (z, 0.0, 0.0)
    };

    let inv = x.recip();
    let inv2 = inv * inv;
    let series = STIRLING.iter().rev().fold(0.0, |acc, c| acc * inv2 + c) * inv;
    let ln_x = x.ln();
    let main = (x - 0.5) * ln_x - x;
    let value = main + HALF_LN_2PI + series - log_shift;
    let bound = f64::EPSILON * 4.0 * ((x - 0.5) * ln_x + x + 1.0) + shift_bound;
    Ok((value, bound))
}

/// Natural log of the gamma function for `z > 0`.
///
/// Arguments below 12 are shifted up with `ln Γ(z) = ln Γ(z+n) - ln(z (z+1) ... (z+n-1))`
/// and the Stirling series with eight Bernoulli corrections is applied there.
pub fn lgamma_oracle(z: f64) -> Result<f64> {
    lgamma_with_bound(z).map(|(v, _)| v)
}

/// `ln B(u, v)`, symmetric in its arguments.
pub fn ln_beta(u: f64, v: f64) -> Result<f64> {
    Ok(lgamma_oracle(u)? + lgamma_oracle(v)? - lgamma_oracle(u + v)?)
}

// ---------------------------------------------------------------------------
// routes

fn closed_form(integral: &BetaIntegral) -> Result<QuadratureResult> {
    let (u, v) = integral.beta_exponents();
    let (lu, eu) = lgamma_with_bound(u)?;
    let (lv, ev) = lgamma_with_bound(v)?;
    let (luv, euv) = lgamma_with_bound(u + v)?;
    let value = (lu + lv - luv).exp() / integral.n;
    let log_err = eu + ev + euv + 4.0 * f64::EPSILON * (lu.abs() + lv.abs() + luv.abs());
    Ok(QuadratureResult {
        value,
        error_estimate: value * (log_err + 2.0 * f64::EPSILON),
        evaluations: 3,
        route: Route::ClosedForm,
    })
}

/// `ln σ(y) = -ln(1 + e^{-y})` without overflow.
#[inline]
fn ln_sigmoid(y: f64) -> f64 {
    if y >= 0.0 {
        -(-y).exp().ln_1p()
    } else {
        y - y.exp().ln_1p()
    }
}

/// Log of the transformed integrand at abscissa `s`.
///
/// With `t = σ(π sinh s)` we have `dt/ds = π cosh s · t (1-t)`, so
/// `t^{u-1} (1-t)^{v-1} dt/ds = π cosh s · t^u (1-t)^v`.
#[inline]
fn log_weighted_integrand(u: f64, v: f64, s: f64) -> f64 {
    let y = PI * s.sinh();
    (PI * s.cosh()).ln() + u * ln_sigmoid(y) + v * ln_sigmoid(-y)
}

/// Distance from the origin beyond which the integrand is negligible on the
/// side governed by `dir` (`+1` or `-1`).
fn truncation_point(u: f64, v: f64, dir: f64) -> f64 {
    const STEP: f64 = 0.125;
    const DROP: f64 = 50.0;
    const LIMIT: f64 = 24.0;
    let mut peak = f64::NEG_INFINITY;
    let mut s = 0.0;
    while s < LIMIT {
        let g = log_weighted_integrand(u, v, dir * s);
        if g > peak {
            peak = g;
        } else if g < peak - DROP {
            return s;
        }
        s += STEP;
    }
    LIMIT
}

fn transformed(integral: &BetaIntegral, config: &TanhSinhConfig) -> Result<QuadratureResult> {
    let (u, v) = integral.beta_exponents();
    let left = truncation_point(u, v, -1.0);
    let right = truncation_point(u, v, 1.0);
    let f = |s: f64| log_weighted_integrand(u, v, s).exp();

    // Level 0 samples every multiple of h0; each later level halves h and adds
    // the odd multiples of the new step.
    let mut h = 0.5;
    let mut acc = CompensatedSum::new();
    let mut evaluations = 0u64;
    let lo = -(left / h).ceil() as i64;
    let hi = (right / h).ceil() as i64;
    for j in lo..=hi {
        acc.add(f(j as f64 * h));
        evaluations += 1;
    }
    let mut estimate = h * acc.value();
    let mut previous;
    loop {
        h *= 0.5;
        let lo = -(left / h).ceil() as i64;
        let hi = (right / h).ceil() as i64;
        let first_odd = if lo % 2 == 0 { lo + 1 } else { lo };
        let added = ((hi - first_odd) / 2 + 1).max(0) as u64;
        if evaluations + added > config.max_evaluations {
            let best = estimate / integral.n;
            return Err(Error::Convergence {
                message: format!(
                    "tanh-sinh did not reach relative tolerance {:e} within {} evaluations",
                    config.rel_tol, config.max_evaluations
                ),
                best_estimate: best,
            });
        }
        let mut j = first_odd;
        while j <= hi {
            acc.add(f(j as f64 * h));
            j += 2;
        }
        evaluations += added;
        previous = estimate;
        estimate = h * acc.value();
        let diff = (estimate - previous).abs();
        if diff <= config.rel_tol * estimate.abs() {
            let value = estimate / integral.n;
            let floor = 64.0 * f64::EPSILON * value.abs();
            return Ok(QuadratureResult {
                value,
                error_estimate: (diff / integral.n).max(floor),
                evaluations,
                route: Route::Transformed,
            });
        }
    }
}

/// Evaluates the integral by the chosen route with default settings.
pub fn beta_integral(integral: &BetaIntegral, route: Route) -> Result<QuadratureResult> {
    beta_integral_with(integral, route, &TanhSinhConfig::default())
}

/// Evaluates the integral by the chosen route; `config` only affects the
/// transformed route.
pub fn beta_integral_with(
    integral: &BetaIntegral,
    route: Route,
    config: &TanhSinhConfig,
) -> Result<QuadratureResult> {
    match route {
        Route::ClosedForm => closed_form(integral),
        Route::Transformed => transformed(integral, config),
    }
}

/// `P = ∫ x^{a+b-1} / √(1-x^{2b}) dx`.
pub fn p_integral(params: ProductParams, route: Route) -> Result<QuadratureResult> {
    beta_integral(&GeneralBetaSpec::from_params(params).numerator(), route)
}

/// `Q = ∫ x^{a-1} / √(1-x^{2b}) dx`.
pub fn q_integral(params: ProductParams, route: Route) -> Result<QuadratureResult> {
    beta_integral(&GeneralBetaSpec::from_params(params).denominator(), route)
}

/// `∫ x^{a+2b-1}/√(1-x^{2b}) − a/(a+b) · ∫ x^{a-1}/√(1-x^{2b})`, both on the
/// transformed route. Vanishes identically.
pub fn reduction_residual(params: ProductParams) -> Result<f64> {
    let (a, b) = (params.a(), params.b());
    let shifted = beta_integral(&BetaIntegral::new(a + 2.0 * b, b, 2.0 * b)?, Route::Transformed)?;
    let q = q_integral(params, Route::Transformed)?;
    Ok(shifted.value - a / (a + b) * q.value)
}
