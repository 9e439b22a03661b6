//! Finite stepped products.
//!
//! Three families share the parameters `(a, b)`:
//!
//! * gamma form: `a (a+b) (a+2b) ... (a+(n-1)b)`
//! * delta form: `a (a+2b) (a+4b) ... (a+(2n-2)b)`
//! * theta form: `(a+b) (a+3b) ... (a+(2n-1)b)`
//!
//! Every factor is `a + m·b` for an integer multiple `m`, computed with a single
//! fused multiply-add. Because `2j·b` and `j·(2b)` are the same binary64 value,
//! the gamma factors at `2n` are bitwise the union of the delta and theta
//! factors at `n`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::sum::CompensatedSum;

/// Largest product length accepted by any evaluator.
pub const MAX_FACTORS: u64 = 10_000_000;

/// The pair `(a, b)`, both finite and strictly positive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProductParams {
    a: f64,
    b: f64,
}

impl ProductParams {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        for (name, v) in [("a", a), ("b", b)] {
            if !v.is_finite() {
                return Err(Error::validation(format!("{name} must be finite, got {v}")));
            }
            if v <= 0.0 {
                return Err(Error::validation(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(Self { a, b })
    }

    /// Parses decimal strings, rejecting anything with more than 15
    /// significant digits so that the stored binary64 value round-trips.
    pub fn parse(a: &str, b: &str) -> Result<Self> {
        Self::new(parse_decimal(a)?, parse_decimal(b)?)
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }
}

/// Parses a decimal literal holding at most 15 significant digits.
pub fn parse_decimal(s: &str) -> Result<f64> {
    let s = s.trim();
    let mantissa = s.split(['e', 'E']).next().unwrap_or("");
    let digits: String = mantissa.chars().filter(char::is_ascii_digit).collect();
    let significant = digits.trim_start_matches('0');
    // Trailing zeros after a decimal point are significant, as are those of an integer literal.
    if significant.len() > 15 {
        return Err(Error::validation(format!(
            "{s:?} has {} significant digits; at most 15 are representable",
            significant.len()
        )));
    }
    s.parse::<f64>()
        .map_err(|e| Error::validation(format!("cannot parse {s:?} as a number: {e}")))
}

/// Which of the three stepped families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ProductKind {
    /// Start `a`, step `b`.
    Gamma,
    /// Start `a`, step `2b`.
    Delta,
    /// Start `a + b`, step `2b`.
    Theta,
}

impl ProductKind {
    pub const ALL: [ProductKind; 3] = [ProductKind::Gamma, ProductKind::Delta, ProductKind::Theta];

    /// Integer multiple of `b` carried by factor `j` (zero-based).
    #[inline]
    fn multiple(self, j: u64) -> u64 {
        match self {
            ProductKind::Gamma => j,
            ProductKind::Delta => 2 * j,
            ProductKind::Theta => 2 * j + 1,
        }
    }

    /// Factor `j` (zero-based) of the product.
    #[inline]
    pub fn factor(self, params: &ProductParams, j: u64) -> f64 {
        (self.multiple(j) as f64).mul_add(params.b, params.a)
    }

    /// The first `n` factors, in order.
    pub fn factors(self, params: ProductParams, n: u64) -> impl Iterator<Item = f64> {
        (0..n).map(move |j| self.factor(&params, j))
    }

    pub fn name(self) -> &'static str {
        match self {
            ProductKind::Gamma => "gamma",
            ProductKind::Delta => "delta",
            ProductKind::Theta => "theta",
        }
    }
}

impl std::str::FromStr for ProductKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "gamma" => Ok(ProductKind::Gamma),
            "delta" => Ok(ProductKind::Delta),
            "theta" => Ok(ProductKind::Theta),
            other => Err(Error::validation(format!(
                "unknown product form {other:?} (expected gamma, delta or theta)"
            ))),
        }
    }
}

/// Natural logarithm of a product whose factors are all positive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LogProductValue {
    pub log_value: f64,
}

impl LogProductValue {
    /// The product itself; may overflow to infinity.
    pub fn exp(&self) -> f64 {
        self.log_value.exp()
    }
}

fn check_len(n: u64) -> Result<()> {
    if n > MAX_FACTORS {
        return Err(Error::validation(format!(
            "product length {n} exceeds the cap of {MAX_FACTORS}"
        )));
    }
    Ok(())
}

fn direct_product(kind: ProductKind, params: ProductParams, n: u64) -> Result<f64> {
    check_len(n)?;
    let value = kind.factors(params, n).product::<f64>();
    if !value.is_finite() {
        return Err(Error::Range(format!(
            "{} product with n = {n} overflows binary64; use log_product",
            kind.name()
        )));
    }
    Ok(value)
}

/// `a (a+b) ... (a+(n-1)b)`; 1 for `n = 0`.
pub fn gamma_product(params: ProductParams, n: u64) -> Result<f64> {
    direct_product(ProductKind::Gamma, params, n)
}

/// `a (a+2b) ... (a+(2n-2)b)`; 1 for `n = 0`.
pub fn delta_product(params: ProductParams, n: u64) -> Result<f64> {
    direct_product(ProductKind::Delta, params, n)
}

/// `(a+b) (a+3b) ... (a+(2n-1)b)`; 1 for `n = 0`.
pub fn theta_product(params: ProductParams, n: u64) -> Result<f64> {
    direct_product(ProductKind::Theta, params, n)
}

/// Evaluates the product of the given family directly.
pub fn product(kind: ProductKind, params: ProductParams, n: u64) -> Result<f64> {
    direct_product(kind, params, n)
}

/// Sum of the logs of the `n` factors, accumulated with compensation.
pub fn log_product(kind: ProductKind, params: ProductParams, n: u64) -> Result<LogProductValue> {
    check_len(n)?;
    let acc: CompensatedSum = kind.factors(params, n).map(f64::ln).collect();
    Ok(LogProductValue {
        log_value: acc.value(),
    })
}

/// `log Γ:2n − log Δ:n − log Θ:n`, which vanishes identically.
pub fn splitting_identity_residual(params: ProductParams, n: u64) -> Result<f64> {
    let doubled = n
        .checked_mul(2)
        .ok_or_else(|| Error::validation("product length overflows"))?;
    let gamma = log_product(ProductKind::Gamma, params, doubled)?.log_value;
    let delta = log_product(ProductKind::Delta, params, n)?.log_value;
    let theta = log_product(ProductKind::Theta, params, n)?.log_value;
    Ok(gamma - delta - theta)
}
