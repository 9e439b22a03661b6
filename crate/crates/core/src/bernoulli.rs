//! Exact Bernoulli numbers.
//!
//! The table is generated from `Σ_{k=0}^{n} C(n+1, k) B_k = 0` in exact
//! rational arithmetic, with `B_1 = -1/2`. The summation machinery consumes
//! the positive coefficients `(2k+1)·|B_{2k}|`, i.e. `1/2, 1/6, 1/6, 3/10, 5/6, ...`.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Largest `K` accepted by [`bernoulli_numbers`]; the table then runs to `B_120`.
pub const MAX_HALF_INDEX: usize = 60;

/// Exact rational number in lowest terms with a positive denominator.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rational(BigRational);

impl Rational {
    pub fn new(numerator: i64, denominator: i64) -> Self {
        assert!(denominator != 0, "zero denominator");
        Rational(BigRational::new(numerator.into(), denominator.into()))
    }

    pub fn from_integer(n: i64) -> Self {
        Rational(BigRational::from_integer(n.into()))
    }

    pub fn numerator(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denominator(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn abs(&self) -> Self {
        Rational(self.0.abs())
    }

    /// Nearest binary64 value.
    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl std::ops::Mul for &Rational {
    type Output = Rational;
    fn mul(self, rhs: &Rational) -> Rational {
        Rational(&self.0 * &rhs.0)
    }
}

impl std::ops::Div for &Rational {
    type Output = Rational;
    fn div(self, rhs: &Rational) -> Rational {
        Rational(&self.0 / &rhs.0)
    }
}

impl std::ops::Add for &Rational {
    type Output = Rational;
    fn add(self, rhs: &Rational) -> Rational {
        Rational(&self.0 + &rhs.0)
    }
}

/// `B_0 ..= B_{max_index}`.
#[derive(Debug, Clone, PartialEq)]
pub struct BernoulliTable {
    max_index: usize,
    values: Vec<Rational>,
}

impl BernoulliTable {
    pub fn max_index(&self) -> usize {
        self.max_index
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn get(&self, n: usize) -> Option<&Rational> {
        self.values.get(n)
    }

    /// `(2k+1)·|B_{2k}|` for `k >= 1`.
    pub fn euler_coefficient(&self, k: usize) -> Result<Rational> {
        if k == 0 {
            return Err(Error::validation("euler coefficient index starts at 1"));
        }
        if 2 * k > self.max_index {
            return Err(Error::validation(format!(
                "table runs to B_{}, coefficient {k} needs B_{}",
                self.max_index,
                2 * k
            )));
        }
        let odd = Rational::from_integer(2 * k as i64 + 1);
        Ok(&odd * &self.values[2 * k].abs())
    }
}

/// Binomial row `C(n, 0..=n)`.
fn binomial_row(n: usize) -> Vec<BigInt> {
    let mut row = Vec::with_capacity(n + 1);
    let mut c = BigInt::one();
    row.push(c.clone());
    for k in 0..n {
        c = c * BigInt::from(n - k) / BigInt::from(k + 1);
        row.push(c.clone());
    }
    row
}

/// Bernoulli numbers `B_0 ..= B_{2K}`.
pub fn bernoulli_numbers(half_index: usize) -> Result<BernoulliTable> {
    if half_index == 0 || half_index > MAX_HALF_INDEX {
        return Err(Error::validation(format!(
            "K must lie in 1..={MAX_HALF_INDEX}, got {half_index}"
        )));
    }
    let max_index = 2 * half_index;
    let mut values: Vec<BigRational> = Vec::with_capacity(max_index + 1);
    values.push(BigRational::one());
    for n in 1..=max_index {
        if n > 1 && n % 2 == 1 {
            values.push(BigRational::zero());
            continue;
        }
        let row = binomial_row(n + 1);
        let partial = values.iter().zip(&row).fold(BigRational::zero(), |acc, (b, c)| {
            acc + b * BigRational::from_integer(c.clone())
        });
        values.push(-partial / BigRational::from_integer(BigInt::from(n + 1)));
    }
    Ok(BernoulliTable {
        max_index,
        values: values.into_iter().map(Rational).collect(),
    })
}

/// `(2k+1)·|B_{2k}|`, building a table just large enough.
pub fn euler_coefficient(k: usize) -> Result<Rational> {
    if k == 0 {
        return Err(Error::validation("euler coefficient index starts at 1"));
    }
    bernoulli_numbers(k)?.euler_coefficient(k)
}
