//! Euler–Maclaurin expansion of the log-products and the constants `A`, `B`, `C`.
//!
//! For the gamma form the expansion reads
//!
//! ```text
//! ln Γ:x = ln A + (a/b − ½ + x) ln(a − b + bx) − x
//!          + Σ_{j≥1} (−1)^{j+1} c_j/((2j−1)(2j)(2j+1)) · (b/(a − b + bx))^{2j−1}
//! ```
//!
//! with `c_j = (2j+1)|B_{2j}|`. The delta form follows by `b → 2b`, the theta
//! form by additionally `a → a + b`; their constants are `B` and `C`. The
//! series is asymptotic, not convergent, so the order is capped.

use std::sync::OnceLock;

use serde::Serialize;

use crate::bernoulli::{bernoulli_numbers, Rational};
use crate::error::{Error, Result};
use crate::interpolation::{half_index_delta, HalfIndexRoute};
use crate::products::{log_product, ProductKind, ProductParams};
use crate::quadrature::lgamma_oracle;

/// Highest correction order accepted by the expansion.
pub const MAX_ORDER: usize = 8;
pub const DEFAULT_ORDER: usize = 4;
pub const DEFAULT_X_REF: u64 = 40;

/// Relative tolerance for the four relations between `A`, `B`, `C` and `k`.
pub const RELATION_TOLERANCE: f64 = 1e-8;
/// Relative tolerance between limit-fit and closed-form constants.
pub const PROVENANCE_TOLERANCE: f64 = 1e-9;
/// Allowed relative drift of a fitted constant between `x_ref` and `2 x_ref`.
pub const STABILITY_TOLERANCE: f64 = 1e-10;

const HALF_LN_2PI: f64 = 0.918_938_533_204_672_8;

struct Coefficients {
    /// `c_j / ((2j−1)(2j)(2j+1))`, j = 1..=MAX_ORDER.
    expansion: [f64; MAX_ORDER],
    /// `c_j / (2j+1)!`, j = 1..=MAX_ORDER.
    summation: [f64; MAX_ORDER],
}

fn coefficients() -> &'static Coefficients {
    static TABLE: OnceLock<Coefficients> = OnceLock::new();
    TABLE.get_or_init(|| {
        let table = bernoulli_numbers(MAX_ORDER).expect("order within table range");
        let mut expansion = [0.0; MAX_ORDER];
        let mut summation = [0.0; MAX_ORDER];
        let mut factorial = Rational::from_integer(1);
        let mut next = 1i64;
        for j in 1..=MAX_ORDER {
            let c = table.euler_coefficient(j).expect("order within table range");
            let jj = j as i64;
            let triple = Rational::from_integer((2 * jj - 1) * 2 * jj * (2 * jj + 1));
            expansion[j - 1] = (&c / &triple).to_f64();
            while next <= 2 * jj + 1 {
                factorial = &factorial * &Rational::from_integer(next);
                next += 1;
            }
            summation[j - 1] = (&c / &factorial).to_f64();
        }
        Coefficients { expansion, summation }
    })
}

fn check_order(order: usize) -> Result<()> {
    if order > MAX_ORDER {
        return Err(Error::validation(format!(
            "expansion order {order} exceeds {MAX_ORDER}; the series diverges"
        )));
    }
    Ok(())
}

/// Parameters `(a', b')` for which the gamma-form expansion describes `kind`.
pub fn form_params(params: ProductParams, kind: ProductKind) -> ProductParams {
    let (a, b) = (params.a(), params.b());
    let (a2, b2) = match kind {
        ProductKind::Gamma => (a, b),
        ProductKind::Delta => (a, 2.0 * b),
        ProductKind::Theta => (a + b, 2.0 * b),
    };
    ProductParams::new(a2, b2).expect("substitution keeps parameters positive")
}

/// Truncated expansion of `ln Γ:x` with `K = order` correction terms.
pub fn em_log_gamma_form(params: ProductParams, x: u64, order: usize, log_a: f64) -> Result<f64> {
    check_order(order)?;
    let (a, b) = (params.a(), params.b());
    let w = (x as f64 - 1.0).mul_add(b, a);
    if w <= 0.0 {
        return Err(Error::domain(format!("a − b + bx = {w} must be positive")));
    }
    let ratio = b / w;
    let ratio2 = ratio * ratio;
    let mut power = ratio;
    let mut correction = 0.0;
    for (j, c) in coefficients().expansion[..order].iter().enumerate() {
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        correction += sign * c * power;
        power *= ratio2;
    }
    Ok(log_a + (a / b - 0.5 + x as f64) * w.ln() - x as f64 + correction)
}

/// A term `X(x)` of a progression together with what the summation formula
/// needs from it.
pub trait Summand {
    fn value(&self, x: f64) -> f64;
    /// Any antiderivative; its constant folds into the summation constant.
    fn antiderivative(&self, x: f64) -> f64;
    /// The derivative of odd `order` at `x`.
    fn odd_derivative(&self, x: f64, order: u32) -> f64;
}

/// `X(x) = c`.
#[derive(Debug, Clone, Copy)]
pub struct ConstantSummand(pub f64);

impl Summand for ConstantSummand {
    fn value(&self, _x: f64) -> f64 {
        self.0
    }

    fn antiderivative(&self, x: f64) -> f64 {
        self.0 * x
    }

    fn odd_derivative(&self, _x: f64, _order: u32) -> f64 {
        0.0
    }
}

/// `X(x) = ln(a − b + bx)`, the log of factor `x` of the gamma form.
#[derive(Debug, Clone, Copy)]
pub struct LogLinearSummand {
    pub a: f64,
    pub b: f64,
}

impl LogLinearSummand {
    fn base(&self, x: f64) -> f64 {
        self.a - self.b + self.b * x
    }
}

impl Summand for LogLinearSummand {
    fn value(&self, x: f64) -> f64 {
        self.base(x).ln()
    }

    fn antiderivative(&self, x: f64) -> f64 {
        let w = self.base(x);
        w / self.b * w.ln() - x
    }

    fn odd_derivative(&self, x: f64, order: u32) -> f64 {
        // d^r/dx^r ln(w) = (−1)^{r−1} (r−1)! (b/w)^r
        let r = order as i32;
        let fact: f64 = (1..order).map(f64::from).product();
        let sign = if order % 2 == 1 { 1.0 } else { -1.0 };
        sign * fact * (self.b / self.base(x)).powi(r)
    }
}

/// `∫X + ½X + Σ_{j=1}^{K} (−1)^{j+1} c_j/(2j+1)! · X^{(2j−1)}`, the sum
/// `X(1) + ... + X(x)` up to an additive constant.
pub fn generic_em_sum<S: Summand + ?Sized>(summand: &S, x: f64, order: usize) -> Result<f64> {
    check_order(order)?;
    let mut total = summand.antiderivative(x) + 0.5 * summand.value(x);
    for (j, c) in coefficients().summation[..order].iter().enumerate() {
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        total += sign * c * summand.odd_derivative(x, 2 * j as u32 + 1);
    }
    Ok(total)
}

/// `ln` of the constant (`A`, `B` or `C`) for `kind`, fitted from the exact
/// log-product at `x_ref`.
pub fn log_constant_limit_fit(
    params: ProductParams,
    kind: ProductKind,
    x_ref: u64,
    order: usize,
) -> Result<f64> {
    if x_ref == 0 {
        return Err(Error::validation("x_ref must be positive"));
    }
    let substituted = form_params(params, kind);
    let fit = |x: u64| -> Result<f64> {
        Ok(log_product(kind, params, x)?.log_value - em_log_gamma_form(substituted, x, order, 0.0)?)
    };
    let at_ref = fit(x_ref)?;
    let at_double = fit(2 * x_ref)?;
    let drift = (at_ref - at_double).abs();
    if drift > STABILITY_TOLERANCE {
        return Err(Error::Convergence {
            message: format!(
                "{} constant moves by {drift:e} between x = {x_ref} and {}; increase x_ref or order",
                kind.name(),
                2 * x_ref
            ),
            best_estimate: at_double.exp(),
        });
    }
    Ok(at_ref)
}

/// The constant for `kind`, fitted from the exact product.
pub fn constant_limit_fit(params: ProductParams, kind: ProductKind, x_ref: u64, order: usize) -> Result<f64> {
    log_constant_limit_fit(params, kind, x_ref, order).map(f64::exp)
}

/// `ln` of `√(2π) b^{½−a/b} e^{1−a/b} / Γ(a/b)` after the substitution for `kind`.
pub fn log_constant_closed_form(params: ProductParams, kind: ProductKind) -> Result<f64> {
    let sub = form_params(params, kind);
    let r = sub.a() / sub.b();
    Ok(HALF_LN_2PI + (0.5 - r) * sub.b().ln() + (1.0 - r) - lgamma_oracle(r)?)
}

pub fn constant_closed_form(params: ProductParams, kind: ProductKind) -> Result<f64> {
    log_constant_closed_form(params, kind).map(f64::exp)
}

/// Absolute error of the expansion at `x` for every order `0..=max_order`,
/// using the closed-form constant.
pub fn expansion_errors(params: ProductParams, x: u64, max_order: usize) -> Result<Vec<f64>> {
    let exact = log_product(ProductKind::Gamma, params, x)?.log_value;
    let log_a = log_constant_closed_form(params, ProductKind::Gamma)?;
    (0..=max_order)
        .map(|k| Ok((em_log_gamma_form(params, x, k, log_a)? - exact).abs()))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    LimitFit,
    ClosedForm,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConstantValue {
    pub value: f64,
    pub provenance: Provenance,
}

/// Relative residuals of the four relations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RelationResiduals {
    /// `A e^½ = B C`
    pub a_sqrt_e_eq_bc: f64,
    /// `B = C k √e`
    pub b_eq_ck_sqrt_e: f64,
    /// `C = √(A/k)`
    pub c_eq_sqrt_a_over_k: f64,
    /// `B = √(k A e)`
    pub b_eq_sqrt_kae: f64,
}

impl RelationResiduals {
    pub fn compute(a: f64, b: f64, c: f64, k: f64) -> Self {
        let rel = |lhs: f64, rhs: f64| (lhs - rhs).abs() / rhs.abs();
        let sqrt_e = 0.5f64.exp();
        Self {
            a_sqrt_e_eq_bc: rel(a * sqrt_e, b * c),
            b_eq_ck_sqrt_e: rel(b, c * k * sqrt_e),
            c_eq_sqrt_a_over_k: rel(c, (a / k).sqrt()),
            b_eq_sqrt_kae: rel(b, (k * a).sqrt() * sqrt_e),
        }
    }

    pub fn named(&self) -> [(&'static str, f64); 4] {
        [
            ("A*sqrt(e) = B*C", self.a_sqrt_e_eq_bc),
            ("B = C*k*sqrt(e)", self.b_eq_ck_sqrt_e),
            ("C = sqrt(A/k)", self.c_eq_sqrt_a_over_k),
            ("B = sqrt(k*A*e)", self.b_eq_sqrt_kae),
        ]
    }

    pub fn max(&self) -> f64 {
        self.named().iter().map(|(_, r)| *r).fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConstantTriple {
    #[serde(rename = "A")]
    pub a: f64,
    #[serde(rename = "B")]
    pub b: f64,
    #[serde(rename = "C")]
    pub c: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AsymptoticConstants {
    #[serde(rename = "A")]
    pub a: ConstantValue,
    #[serde(rename = "B")]
    pub b: ConstantValue,
    #[serde(rename = "C")]
    pub c: ConstantValue,
    pub k: f64,
    /// The same constants from the closed form.
    pub closed_form: ConstantTriple,
    /// Largest relative gap between the two provenances.
    pub provenance_gap: f64,
    pub residuals: RelationResiduals,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticConfig {
    pub order: usize,
    pub x_ref: u64,
    pub relation_tolerance: f64,
    pub provenance_tolerance: f64,
}

impl Default for AsymptoticConfig {
    fn default() -> Self {
        Self {
            order: DEFAULT_ORDER,
            x_ref: DEFAULT_X_REF,
            relation_tolerance: RELATION_TOLERANCE,
            provenance_tolerance: PROVENANCE_TOLERANCE,
        }
    }
}

/// Fits `A`, `B`, `C` from the exact products, checks them against the
/// closed form and checks the four relations with `k` from quadrature.
pub fn verify_constant_relations(params: ProductParams) -> Result<AsymptoticConstants> {
    verify_constant_relations_with(params, &AsymptoticConfig::default())
}

pub fn verify_constant_relations_with(
    params: ProductParams,
    config: &AsymptoticConfig,
) -> Result<AsymptoticConstants> {
    let fitted = |kind| -> Result<ConstantValue> {
        Ok(ConstantValue {
            value: constant_limit_fit(params, kind, config.x_ref, config.order)?,
            provenance: Provenance::LimitFit,
        })
    };
    let a = fitted(ProductKind::Gamma)?;
    let b = fitted(ProductKind::Delta)?;
    let c = fitted(ProductKind::Theta)?;
    let closed_form = ConstantTriple {
        a: constant_closed_form(params, ProductKind::Gamma)?,
        b: constant_closed_form(params, ProductKind::Delta)?,
        c: constant_closed_form(params, ProductKind::Theta)?,
    };
    let k = half_index_delta(params, HalfIndexRoute::QuadratureRatio)?;

    let gaps = [
        ("A limit fit = closed form", a.value, closed_form.a),
        ("B limit fit = closed form", b.value, closed_form.b),
        ("C limit fit = closed form", c.value, closed_form.c),
    ];
    let mut provenance_gap: f64 = 0.0;
    for (relation, fit, closed) in gaps {
        let gap = (fit - closed).abs() / closed;
        provenance_gap = provenance_gap.max(gap);
        if gap.is_nan() || gap > config.provenance_tolerance {
            return Err(Error::Integrity {
                relation: relation.to_string(),
                residual: gap,
                tolerance: config.provenance_tolerance,
            });
        }
    }

    let residuals = RelationResiduals::compute(a.value, b.value, c.value, k);
    for (relation, residual) in residuals.named() {
        if residual.is_nan() || residual > config.relation_tolerance {
            return Err(Error::Integrity {
                relation: relation.to_string(),
                residual,
                tolerance: config.relation_tolerance,
            });
        }
    }

    Ok(AsymptoticConstants {
        a,
        b,
        c,
        k,
        closed_form,
        provenance_gap,
        residuals,
    })
}

/// `(1 + 1/(2i))^i`, which increases towards `√e`.
pub fn exp_half_limit(i: u64) -> Result<f64> {
    if i == 0 {
        return Err(Error::validation("i must be at least 1"));
    }
    let i = i as f64;
    Ok((i * (0.5 / i).ln_1p()).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn p(a: f64, b: f64) -> ProductParams {
        ProductParams::new(a, b).unwrap()
    }

    fn rel(x: f64, y: f64) -> f64 {
        (x - y).abs() / y.abs()
    }

    fn ln_factorial_exact(n: u32) -> f64 {
        ((1..=n as u128).product::<u128>() as f64).ln()
    }

    #[test]
    fn coefficient_tables() {
        let c = coefficients();
        assert_eq!(c.expansion[0], 1.0 / 12.0);
        assert_eq!(c.expansion[1], 1.0 / 360.0);
        assert_eq!(c.expansion[2], 1.0 / 1260.0);
        assert_eq!(c.summation[0], 1.0 / 12.0);
        assert_eq!(c.summation[1], 1.0 / 720.0);
        assert_eq!(c.summation[2], 1.0 / 30240.0);
    }

    #[test]
    fn stirling_case_matches_ln_30_factorial() {
        let v = em_log_gamma_form(p(1.0, 1.0), 30, 4, 0.5 * (2.0 * PI).ln()).unwrap();
        assert!((v - ln_factorial_exact(30)).abs() < 1e-12);
    }

    #[test]
    fn zeroth_order_error_is_order_one_over_x() {
        let log_a = log_constant_closed_form(p(1.0, 1.0), ProductKind::Gamma).unwrap();
        for x in [10u32, 20, 30] {
            let err = em_log_gamma_form(p(1.0, 1.0), x as u64, 0, log_a).unwrap() - ln_factorial_exact(x);
            assert!((err * 12.0 * x as f64 + 1.0).abs() < 0.05, "x = {x}: {err}");
        }
    }

    #[test]
    fn a2_b1_at_twenty() {
        let params = p(2.0, 1.0);
        let log_a = log_constant_closed_form(params, ProductKind::Gamma).unwrap();
        let v = em_log_gamma_form(params, 20, 4, log_a).unwrap();
        let exact = log_product(ProductKind::Gamma, params, 20).unwrap().log_value;
        assert!((exact - ln_factorial_exact(21)).abs() < 1e-13);
        assert!((v - exact).abs() < 1e-12);
    }

    #[test]
    fn domain_and_order_errors() {
        assert!(matches!(
            em_log_gamma_form(p(1.0, 1.0), 0, 4, 0.0),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            em_log_gamma_form(p(1.0, 1.0), 5, 9, 0.0),
            Err(Error::Validation(_))
        ));
        assert!(generic_em_sum(&ConstantSummand(1.0), 3.0, 9).is_err());
        assert!(exp_half_limit(0).is_err());
    }

    #[test]
    fn constant_summand() {
        // Σ_{1}^{x} c = c x, and the formula gives c x + c/2.
        let s = generic_em_sum(&ConstantSummand(2.5), 7.0, 4).unwrap();
        assert_eq!(s - 2.5 / 2.0, 2.5 * 7.0);
    }

    #[test]
    fn log_summand_gives_stirling_up_to_constant() {
        let summand = LogLinearSummand { a: 1.0, b: 1.0 };
        // sum_{j=1}^{x} ln j with X(x) = ln x
        let s30 = generic_em_sum(&summand, 30.0, 4).unwrap();
        let constant = ln_factorial_exact(30) - s30;
        assert!((constant - 0.5 * (2.0 * PI).ln()).abs() < 1e-12);
        let s25 = generic_em_sum(&summand, 25.0, 4).unwrap();
        assert!((s25 + constant - ln_factorial_exact(25)).abs() < 1e-12);
    }

    #[test]
    fn specialisation_agrees() {
        for (a, b) in [(0.5, 0.5), (1.0, 1.0), (3.7, 2.0), (1.5, 0.5)] {
            for x in [5u64, 30, 60] {
                for order in 0..=MAX_ORDER {
                    let direct = em_log_gamma_form(p(a, b), x, order, 0.0).unwrap();
                    let generic = generic_em_sum(&LogLinearSummand { a, b }, x as f64, order).unwrap();
                    assert!((direct - generic).abs() <= 1e-14 * (1.0 + direct.abs()));
                }
            }
        }
    }

    #[test]
    fn constants_at_unit_params() {
        let params = p(1.0, 1.0);
        let expected = [
            (ProductKind::Gamma, (2.0 * PI).sqrt(), 2.5066282746),
            (ProductKind::Delta, (2.0f64 * 1f64.exp()).sqrt(), 2.3316439816),
            (ProductKind::Theta, PI.sqrt(), 1.7724538509),
        ];
        for (kind, exact, printed) in expected {
            let closed = constant_closed_form(params, kind).unwrap();
            let fit = constant_limit_fit(params, kind, DEFAULT_X_REF, DEFAULT_ORDER).unwrap();
            assert!(rel(closed, exact) < 1e-13, "{kind:?}");
            assert!(rel(fit, exact) < 1e-10, "{kind:?}");
            assert!((closed - printed).abs() < 1e-10);
        }
    }

    #[test]
    fn relations_at_unit_params() {
        let c = verify_constant_relations(p(1.0, 1.0)).unwrap();
        assert!(rel(c.k, (2.0 / PI).sqrt()) < 1e-12);
        assert!(c.residuals.max() < 1e-9);
        assert_eq!(c.a.provenance, Provenance::LimitFit);
    }

    #[test]
    fn unstable_fit_is_a_convergence_error() {
        assert!(matches!(
            constant_limit_fit(p(1.0, 1.0), ProductKind::Gamma, 3, 4),
            Err(Error::Convergence { .. })
        ));
    }

    #[test]
    fn tight_tolerance_names_the_relation() {
        let cfg = AsymptoticConfig {
            relation_tolerance: 0.0,
            provenance_tolerance: 1.0,
            ..AsymptoticConfig::default()
        };
        match verify_constant_relations_with(p(1.5, 0.5), &cfg) {
            Err(Error::Integrity { relation, .. }) => assert!(relation.contains('=')),
            // every residual exactly zero is possible but would be remarkable
            Ok(c) => assert_eq!(c.residuals.max(), 0.0),
            Err(e) => panic!("{e}"),
        }
    }

    #[test]
    fn divergence_is_visible_at_small_argument() {
        // At x = 1 (w = 1) the terms shrink until j = 4 and then grow.
        let errors = expansion_errors(p(1.0, 1.0), 1, MAX_ORDER).unwrap();
        let (best, _) = errors
            .iter()
            .enumerate()
            .min_by(|x, y| x.1.total_cmp(y.1))
            .unwrap();
        assert!(best > 0 && best < MAX_ORDER, "best order {best}");
        assert!(errors[MAX_ORDER] > 10.0 * errors[best]);
    }

    #[test]
    fn exp_half() {
        assert_eq!(exp_half_limit(1).unwrap(), 1.5);
        let sqrt_e = 0.5f64.exp();
        assert!((sqrt_e - 1.6487212707).abs() < 1e-10);
        assert!((exp_half_limit(1_000_000).unwrap() - sqrt_e).abs() < 1e-6);
        let mut prev = 0.0;
        for i in (1..=2000).chain([10_000, 100_000, 1_000_000, 10_000_000]) {
            let v = exp_half_limit(i).unwrap();
            assert!(v > prev && v < sqrt_e, "i = {i}");
            if i >= 10 {
                assert!(sqrt_e - v <= 0.25 / i as f64);
            }
            prev = v;
        }
    }
}
