//! Half-index values `Δ:½`, `Θ:½`, `Γ:½` of the stepped products.
//!
//! The quadrature routes express each value through ratios of Beta-type
//! integrals. The oracle route uses the continuous interpolation
//! `Δ:n = (2b)^n Γ(a/(2b) + n) / Γ(a/(2b))` evaluated at `n = ½`; it serves
//! only as an independent check.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::products::{theta_product, ProductParams};
use crate::quadrature::{beta_integral, lgamma_oracle, BetaIntegral, Route};

/// Relative tolerance for the internal two-route checks.
pub const ROUTE_TOLERANCE: f64 = 1e-10;

/// How `k = Δ:½` is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum HalfIndexRoute {
    /// `√(a P / Q)` with both integrals from the transformed quadrature.
    QuadratureRatio,
    /// Log-gamma interpolation of the product.
    GammaOracle,
}

impl std::str::FromStr for HalfIndexRoute {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "quad" | "quadrature" => Ok(HalfIndexRoute::QuadratureRatio),
            "oracle" | "gamma" => Ok(HalfIndexRoute::GammaOracle),
            other => Err(Error::validation(format!(
                "unknown interpolation route {other:?} (expected quad or oracle)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HalfIndexValue {
    pub k: f64,
    pub theta_half: f64,
    pub gamma_half: f64,
    pub route: HalfIndexRoute,
}

/// `∫_0^1 x^{s-1} / √(1 - x^w) dx` on the transformed route.
fn sqrt_kernel_integral(s: f64, w: f64) -> Result<f64> {
    Ok(beta_integral(&BetaIntegral::new(s, 0.5 * w, w)?, Route::Transformed)?.value)
}

/// `√step · Γ(x + ½) / Γ(x)`, the oracle interpolation at one half.
fn oracle_half(x: f64, step: f64) -> Result<f64> {
    Ok(step.sqrt() * (lgamma_oracle(x + 0.5)? - lgamma_oracle(x)?).exp())
}

fn check_agreement(relation: &str, primary: f64, check: f64) -> Result<()> {
    let residual = (primary - check).abs() / primary.abs();
    if residual > ROUTE_TOLERANCE {
        return Err(Error::Integrity {
            relation: relation.to_string(),
            residual,
            tolerance: ROUTE_TOLERANCE,
        });
    }
    Ok(())
}

/// `k = Δ:½`.
pub fn half_index_delta(params: ProductParams, route: HalfIndexRoute) -> Result<f64> {
    let (a, b) = (params.a(), params.b());
    match route {
        HalfIndexRoute::QuadratureRatio => {
            let p = sqrt_kernel_integral(a + b, 2.0 * b)?;
            let q = sqrt_kernel_integral(a, 2.0 * b)?;
            Ok((a * p / q).sqrt())
        }
        HalfIndexRoute::GammaOracle => oracle_half(a / (2.0 * b), 2.0 * b),
    }
}

/// `Θ:½ = √((a+b) ∫x^{a+2b-1}/√(1-x^{2b}) / ∫x^{a+b-1}/√(1-x^{2b}))`
/// without the cross-check.
pub fn theta_half_direct(params: ProductParams) -> Result<f64> {
    let (a, b) = (params.a(), params.b());
    let upper = sqrt_kernel_integral(a + 2.0 * b, 2.0 * b)?;
    let lower = sqrt_kernel_integral(a + b, 2.0 * b)?;
    Ok(((a + b) * upper / lower).sqrt())
}

/// `Γ:½ = √(a ∫x^{a+b/2-1}/√(1-x^b) / ∫x^{a-1}/√(1-x^b))` without the
/// cross-check.
pub fn gamma_half_direct(params: ProductParams) -> Result<f64> {
    let (a, b) = (params.a(), params.b());
    let upper = sqrt_kernel_integral(a + 0.5 * b, b)?;
    let lower = sqrt_kernel_integral(a, b)?;
    Ok((a * upper / lower).sqrt())
}

/// [`theta_half_direct`], checked against `a / k`.
pub fn half_index_theta(params: ProductParams) -> Result<f64> {
    let a = params.a();
    let direct = theta_half_direct(params)?;
    let k = half_index_delta(params, HalfIndexRoute::QuadratureRatio)?;
    check_agreement("theta_half = a/k", direct, a / k)?;
    Ok(direct)
}

/// [`gamma_half_direct`], checked against `√b Γ(a/b + ½)/Γ(a/b)`.
pub fn half_index_gamma(params: ProductParams) -> Result<f64> {
    let (a, b) = (params.a(), params.b());
    let direct = gamma_half_direct(params)?;
    check_agreement("gamma_half oracle", direct, oracle_half(a / b, b)?)?;
    Ok(direct)
}

/// `Δ:(n+½) = k (a+b)(a+3b) ... (a+(2n-1)b)`.
pub fn shifted_half_sequence(params: ProductParams, n: u64) -> Result<f64> {
    let k = half_index_delta(params, HalfIndexRoute::QuadratureRatio)?;
    Ok(k * theta_product(params, n)?)
}

/// All three half-index values. On the oracle route `Θ:½` and `Γ:½` also come
/// from the oracle (`a/k` and the gamma-ratio form).
pub fn half_index_values(params: ProductParams, route: HalfIndexRoute) -> Result<HalfIndexValue> {
    let k = half_index_delta(params, route)?;
    let (theta_half, gamma_half) = match route {
        HalfIndexRoute::QuadratureRatio => (half_index_theta(params)?, half_index_gamma(params)?),
        HalfIndexRoute::GammaOracle => (params.a() / k, oracle_half(params.a() / params.b(), params.b())?),
    };
    Ok(HalfIndexValue {
        k,
        theta_half,
        gamma_half,
        route,
    })
}
