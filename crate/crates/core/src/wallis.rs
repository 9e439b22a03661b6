//! Wallis-type infinite products and their convergence.
//!
//! The general four-parameter product has members
//!
//! ```text
//! (q + jn)(m + p + jn) / ((p + jn)(m + q + jn)),   j = 0, 1, 2, ...
//! ```
//!
//! and converges to `P/Q`, the ratio of the two Beta-type integrals of the
//! [`GeneralBetaSpec`]. The product of `(a, b)` is the special case
//! `q = a, p = a + b, m = b, n = 2b`, and is evaluated through the very same
//! kernel so that both agree bit for bit.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fmt::sig17;
use crate::products::{ProductParams, MAX_FACTORS};
use crate::quadrature::{beta_integral, GeneralBetaSpec, Route};
use crate::sum::CompensatedSum;

/// Partial products longer than this are accumulated as compensated log sums.
pub const LOG_SPACE_THRESHOLD: u64 = 10_000;

struct Member {
    num_lo: f64,
    num_hi: f64,
    den_lo: f64,
    den_hi: f64,
    /// `num_lo·num_hi − den_lo·den_hi`, known in closed form.
    excess: f64,
}

impl Member {
    #[inline]
    fn general(spec: &GeneralBetaSpec, j: u64) -> Self {
        let j = j as f64;
        let den_lo = j.mul_add(spec.n, spec.p);
        let den_hi = j.mul_add(spec.n, spec.m + spec.q);
        Member {
            num_lo: j.mul_add(spec.n, spec.q),
            num_hi: j.mul_add(spec.n, spec.m + spec.p),
            den_lo,
            den_hi,
            excess: spec.m * (spec.q - spec.p),
        }
    }

    /// `(a+2ib)^2 / ((a+(2i-1)b)(a+(2i+1)b))`, `i >= 1`.
    #[inline]
    fn kk(params: &ProductParams, i: u64) -> Self {
        let (a, b) = (params.a(), params.b());
        let mid = ((2 * i) as f64).mul_add(b, a);
        Member {
            num_lo: mid,
            num_hi: mid,
            den_lo: ((2 * i - 1) as f64).mul_add(b, a),
            den_hi: ((2 * i + 1) as f64).mul_add(b, a),
            excess: b * b,
        }
    }

    #[inline]
    fn value(&self) -> f64 {
        (self.num_lo * self.num_hi) / (self.den_lo * self.den_hi)
    }

    #[inline]
    fn ln(&self) -> f64 {
        (self.excess / (self.den_lo * self.den_hi)).ln_1p()
    }
}

fn accumulate(count: u64, member: impl Fn(u64) -> Member) -> f64 {
    if count <= LOG_SPACE_THRESHOLD {
        (0..count).map(|j| member(j).value()).product()
    } else {
        let acc: CompensatedSum = (0..count).map(|j| member(j).ln()).collect();
        acc.value().exp()
    }
}

fn check_terms(n: u64) -> Result<()> {
    if n > MAX_FACTORS {
        return Err(Error::validation(format!(
            "{n} terms exceeds the cap of {MAX_FACTORS}"
        )));
    }
    Ok(())
}

/// Member `i >= 1` of the product of `(a, b)`:
/// `(a+(2i-2)b)(a+2ib) / ((a+(2i-1)b)(a+(2i-1)b))`.
pub fn wallis_member(params: ProductParams, i: u64) -> Result<f64> {
    if i == 0 {
        return Err(Error::validation("members are indexed from 1"));
    }
    Ok(Member::general(&GeneralBetaSpec::from_params(params), i - 1).value())
}

/// Product of the first `terms` members; tends to `P/Q`.
pub fn wallis_partial(params: ProductParams, terms: u64) -> Result<f64> {
    general_ratio_partial(&GeneralBetaSpec::from_params(params), terms)
}

/// Truncation of the product for `k² = aP/Q`.
///
/// The lone leading factor `a` comes first; term 1 is `a/(a+b)` and term
/// `i + 1` is `(a+2ib)^2 / ((a+(2i-1)b)(a+(2i+1)b))`. Every term is O(1), and
/// the truncation approaches the limit from below while [`wallis_partial`]
/// approaches it from above.
pub fn kk_partial(params: ProductParams, terms: u64) -> Result<f64> {
    check_terms(terms)?;
    let a = params.a();
    if terms == 0 {
        return Ok(a);
    }
    let lead = a * (a / (a + params.b()));
    Ok(lead * accumulate(terms - 1, |j| Member::kk(&params, j + 1)))
}

/// Member `j >= 0` of the four-parameter product,
/// `(q + jn)(m + p + jn) / ((p + jn)(m + q + jn))`.
pub fn general_ratio_member(spec: &GeneralBetaSpec, j: u64) -> f64 {
    Member::general(spec, j).value()
}

/// Product of the first `terms` members of the four-parameter product.
pub fn general_ratio_partial(spec: &GeneralBetaSpec, terms: u64) -> Result<f64> {
    check_terms(terms)?;
    Ok(accumulate(terms, |j| Member::general(spec, j)))
}

/// What [`converge`] evaluates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ProductSource {
    /// [`wallis_partial`] against `P/Q`.
    Wallis(ProductParams),
    /// [`kk_partial`] against `aP/Q`.
    Kk(ProductParams),
    /// [`general_ratio_partial`] against the ratio of its two integrals.
    General(GeneralBetaSpec),
}

impl ProductSource {
    fn partial(&self, terms: u64) -> Result<f64> {
        match self {
            ProductSource::Wallis(p) => wallis_partial(*p, terms),
            ProductSource::Kk(p) => kk_partial(*p, terms),
            ProductSource::General(s) => general_ratio_partial(s, terms),
        }
    }

    /// The limit, from the transformed quadrature route.
    pub fn reference(&self) -> Result<f64> {
        let (spec, scale) = match self {
            ProductSource::Wallis(p) => (GeneralBetaSpec::from_params(*p), 1.0),
            ProductSource::Kk(p) => (GeneralBetaSpec::from_params(*p), p.a()),
            ProductSource::General(s) => (*s, 1.0),
        };
        let num = beta_integral(&spec.numerator(), Route::Transformed)?;
        let den = beta_integral(&spec.denominator(), Route::Transformed)?;
        Ok(scale * num.value / den.value)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConvergencePoint {
    #[serde(rename = "N")]
    pub terms: u64,
    pub partial: f64,
    pub abs_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceReport {
    pub partials: Vec<ConvergencePoint>,
    pub reference: f64,
    /// Exponent `r` in `|error| ∝ N^{-r}`; absent when fewer than two usable
    /// tail points were recorded.
    pub fitted_rate: Option<f64>,
    /// Smallest `c` with `|error| <= c/N` over the recorded points with `N >= 100`
    /// (all points if none reach 100).
    pub envelope_constant: f64,
}

impl ConvergenceReport {
    /// `N,partial,reference,abs_error` rows with 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("N,partial,reference,abs_error\n");
        for p in &self.partials {
            out.push_str(&format!(
                "{},{},{},{}\n",
                p.terms,
                sig17(p.partial),
                sig17(self.reference),
                sig17(p.abs_error)
            ));
        }
        out
    }
}

/// Least-squares slope of `ln y` against `ln x`.
fn log_log_slope(points: &[(f64, f64)]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = points
        .iter()
        .filter(|(_, y)| *y > 0.0)
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = pts.iter().map(|(x, _)| (x - mx) * (x - mx)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Evaluates the partials on `schedule` and measures how they approach the
/// quadrature limit. The decay exponent is fitted on the last half of the
/// schedule only.
pub fn converge(source: ProductSource, schedule: &[u64]) -> Result<ConvergenceReport> {
    if schedule.is_empty() {
        return Err(Error::validation("schedule must not be empty"));
    }
    if schedule.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::validation("schedule must be strictly increasing"));
    }
    let reference = source.reference()?;

    let values: Vec<Result<f64>> = std::thread::scope(|scope| {
        let handles: Vec<_> = schedule
            .iter()
            .map(|&n| scope.spawn(move || source.partial(n)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("partial product worker panicked"))
            .collect()
    });

    let mut partials = Vec::with_capacity(schedule.len());
    for (&terms, value) in schedule.iter().zip(values) {
        let partial = value?;
        partials.push(ConvergencePoint {
            terms,
            partial,
            abs_error: (partial - reference).abs(),
        });
    }

    let tail: Vec<(f64, f64)> = partials[partials.len() / 2..]
        .iter()
        .map(|p| (p.terms as f64, p.abs_error))
        .collect();
    let fitted_rate = log_log_slope(&tail).map(|s| -s);

    let scaled = |p: &ConvergencePoint| p.terms as f64 * p.abs_error;
    let large: Vec<f64> = partials.iter().filter(|p| p.terms >= 100).map(scaled).collect();
    let envelope_constant = if large.is_empty() {
        partials.iter().map(scaled).fold(0.0, f64::max)
    } else {
        large.into_iter().fold(0.0, f64::max)
    };

    Ok(ConvergenceReport {
        partials,
        reference,
        fitted_rate,
        envelope_constant,
    })
}
