//! The invariant suite behind `stepprod verify`.
//!
//! Each [`Criterion`] checks one family of identities over a parameter grid
//! and reports its worst residual. Tolerances default to the values below and
//! can be replaced wholesale by a single override.

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::asymptotics::{
    constant_closed_form, constant_limit_fit, em_log_gamma_form, exp_half_limit, expansion_errors,
    log_constant_closed_form, RelationResiduals, DEFAULT_ORDER, DEFAULT_X_REF, MAX_ORDER,
};
use crate::bernoulli::{euler_coefficient, Rational};
use crate::error::{Error, Result};
use crate::interpolation::{half_index_delta, theta_half_direct, HalfIndexRoute};
use crate::products::{log_product, splitting_identity_residual, ProductKind, ProductParams};
use crate::quadrature::{beta_integral, p_integral, q_integral, reduction_residual, GeneralBetaSpec, Route};
use crate::wallis::{
    converge, general_ratio_member, general_ratio_partial, wallis_member, wallis_partial, ProductSource,
};

pub const SPLITTING_TOLERANCE: f64 = 1e-12;
pub const WALLIS_TOLERANCE: f64 = 1e-10;
pub const INTERPOLATION_TOLERANCE: f64 = 1e-10;
pub const REDUCTION_TOLERANCE: f64 = 1e-10;
pub const EXPANSION_TOLERANCE: f64 = 1e-12;
pub const CONSTANT_TOLERANCE: f64 = 1e-9;
pub const RELATION_TOLERANCE: f64 = 1e-8;
pub const EXP_HALF_TOLERANCE: f64 = 1e-6;

/// The 15-point grid `{0.5, 1, 1.5, 2, 3.7} × {0.5, 1, 2}`.
pub fn default_grid() -> Vec<ProductParams> {
    let mut grid = Vec::with_capacity(15);
    for a in [0.5, 1.0, 1.5, 2.0, 3.7] {
        for b in [0.5, 1.0, 2.0] {
            grid.push(ProductParams::new(a, b).expect("grid values are positive"));
        }
    }
    grid
}

/// Fifteen points with `a ∈ [0.5, 4]`, `b ∈ [0.5, 2]`, rounded to six decimals.
pub fn random_grid(seed: u64) -> Vec<ProductParams> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let round = |x: f64| (x * 1e6).round() / 1e6;
    (0..15)
        .map(|_| {
            let a = round(rng.gen_range(0.5..4.0));
            let b = round(rng.gen_range(0.5..2.0));
            ProductParams::new(a, b).expect("sampled values are positive")
        })
        .collect()
}

/// Reads `a,b` pairs, one per line; blank lines and `#` comments are skipped.
pub fn load_grid(path: &Path) -> Result<Vec<ProductParams>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::validation(format!("cannot read grid {}: {e}", path.display())))?;
    parse_grid(&text)
}

pub fn parse_grid(text: &str) -> Result<Vec<ProductParams>> {
    let mut grid = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|f| !f.is_empty())
            .collect();
        if fields.len() != 2 {
            return Err(Error::validation(format!(
                "grid line {}: expected `a,b`, got {line:?}",
                lineno + 1
            )));
        }
        grid.push(ProductParams::parse(fields[0], fields[1])?);
    }
    if grid.is_empty() {
        return Err(Error::validation("grid file has no points"));
    }
    Ok(grid)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Criterion {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    /// Worst residual relative to what `tolerance` bounds.
    pub max_residual: f64,
    pub tolerance: f64,
    pub detail: String,
}

/// Runs every criterion. `tolerance` replaces each criterion's residual
/// tolerance when given; structural checks (bitwise equality, monotonicity,
/// the 1/N bracket) are not affected.
pub fn run_all(grid: &[ProductParams], tolerance: Option<f64>) -> Result<Vec<Criterion>> {
    let tol = |default: f64| tolerance.unwrap_or(default);
    Ok(vec![
        splitting(grid, tol(SPLITTING_TOLERANCE))?,
        wallis_case(tol(WALLIS_TOLERANCE))?,
        interpolation(grid, tol(INTERPOLATION_TOLERANCE))?,
        reduction(grid, tol(REDUCTION_TOLERANCE))?,
        duality(grid)?,
        expansion(grid, tol(EXPANSION_TOLERANCE))?,
        constants(grid, tol(CONSTANT_TOLERANCE), tol(RELATION_TOLERANCE))?,
        coefficient_table()?,
        exp_half(tol(EXP_HALF_TOLERANCE))?,
    ])
}

fn verdict(
    id: u8,
    name: &'static str,
    max_residual: f64,
    tolerance: f64,
    extra_ok: bool,
    detail: String,
) -> Criterion {
    Criterion {
        id,
        name,
        passed: extra_ok && max_residual <= tolerance,
        max_residual,
        tolerance,
        detail,
    }
}

fn rel(x: f64, y: f64) -> f64 {
    (x - y).abs() / y.abs()
}

/// 1. `log Γ:2n = log Δ:n + log Θ:n` for n ≤ 50.
pub fn splitting(grid: &[ProductParams], tolerance: f64) -> Result<Criterion> {
    let mut worst: f64 = 0.0;
    for &p in grid {
        for n in 0..=50 {
            let r = splitting_identity_residual(p, n)?;
            let scale = 1.0 + log_product(ProductKind::Gamma, p, 2 * n)?.log_value.abs();
            worst = worst.max(r.abs() / scale);
        }
    }
    Ok(verdict(
        1,
        "splitting identity",
        worst,
        tolerance,
        true,
        format!("{} points, n <= 50", grid.len()),
    ))
}

/// 2. The classical case `a = b = 1`.
pub fn wallis_case(tolerance: f64) -> Result<Criterion> {
    let unit = ProductParams::new(1.0, 1.0)?;
    let mut worst: f64 = 0.0;
    for route in [Route::Transformed, Route::ClosedForm] {
        worst = worst.max((p_integral(unit, route)?.value - 1.0).abs());
        worst = worst.max((q_integral(unit, route)?.value - std::f64::consts::FRAC_PI_2).abs());
    }
    let k = half_index_delta(unit, HalfIndexRoute::QuadratureRatio)?;
    worst = worst.max((k - std::f64::consts::FRAC_2_PI.sqrt()).abs());

    let report = converge(ProductSource::Wallis(unit), &[1_000, 10_000, 100_000])?;
    let bracketed = report.partials.iter().all(|pt| {
        let n = pt.terms as f64;
        pt.abs_error >= 0.01 / n && pt.abs_error <= 100.0 / n
    });
    let rate = report.fitted_rate.unwrap_or(f64::NAN);
    let rate_ok = (rate - 1.0).abs() <= 0.1;
    Ok(verdict(
        2,
        "wallis case a=b=1",
        worst,
        tolerance,
        bracketed && rate_ok,
        format!("fitted rate {rate:.4}, errors within [0.01/N, 100/N]: {bracketed}"),
    ))
}

/// 3. Route agreement for `k` and `Δ:½ Θ:½ = a`.
pub fn interpolation(grid: &[ProductParams], tolerance: f64) -> Result<Criterion> {
    let mut worst: f64 = 0.0;
    for &p in grid {
        let quad = half_index_delta(p, HalfIndexRoute::QuadratureRatio)?;
        let oracle = half_index_delta(p, HalfIndexRoute::GammaOracle)?;
        worst = worst.max(rel(quad, oracle));
        worst = worst.max(rel(quad * theta_half_direct(p)?, p.a()));
    }
    Ok(verdict(
        3,
        "half-index identities",
        worst,
        tolerance,
        true,
        format!("{} points", grid.len()),
    ))
}

/// 4. `∫x^{a+2b-1}/√(1-x^{2b}) = a/(a+b) ∫x^{a-1}/√(1-x^{2b})`.
pub fn reduction(grid: &[ProductParams], tolerance: f64) -> Result<Criterion> {
    let mut worst: f64 = 0.0;
    for &p in grid {
        let q = q_integral(p, Route::Transformed)?.value;
        worst = worst.max(reduction_residual(p)?.abs() / q);
    }
    Ok(verdict(
        4,
        "integral reduction",
        worst,
        tolerance,
        true,
        format!("{} points", grid.len()),
    ))
}

/// Specs used for the four-parameter limit check.
pub fn duality_specs() -> [GeneralBetaSpec; 3] {
    [
        GeneralBetaSpec {
            p: 1.0,
            q: 2.0,
            m: 1.0,
            n: 2.0,
        },
        GeneralBetaSpec {
            p: 1.5,
            q: 0.7,
            m: 1.0,
            n: 3.0,
        },
        GeneralBetaSpec {
            p: 2.5,
            q: 1.0,
            m: 0.5,
            n: 1.0,
        },
    ]
}

/// 5. Four-parameter product reproduces the Wallis-type product bitwise and
///    converges to its quadrature ratio.
pub fn duality(grid: &[ProductParams]) -> Result<Criterion> {
    const N: u64 = 10_000;
    let mut bitwise = true;
    for &p in grid {
        let spec = GeneralBetaSpec::from_params(p);
        let (mut running_general, mut running_wallis) = (1.0f64, 1.0f64);
        for j in 0..N {
            running_general *= general_ratio_member(&spec, j);
            running_wallis *= wallis_member(p, j + 1)?;
            bitwise &= running_general.to_bits() == running_wallis.to_bits();
        }
        for terms in [0, 1, 2, 10, 100, 1_000, N] {
            bitwise &= general_ratio_partial(&spec, terms)?.to_bits() == wallis_partial(p, terms)?.to_bits();
        }
        bitwise &= general_ratio_partial(&spec, N)?.to_bits() == running_general.to_bits();
    }
    let mut worst: f64 = 0.0;
    for spec in duality_specs() {
        let num = beta_integral(&spec.numerator(), Route::Transformed)?.value;
        let den = beta_integral(&spec.denominator(), Route::Transformed)?.value;
        let err = (general_ratio_partial(&spec, N)? - num / den).abs();
        worst = worst.max(err * N as f64);
    }
    Ok(verdict(
        5,
        "four-parameter duality",
        worst,
        100.0,
        bitwise,
        format!("bitwise equal for N <= {N}: {bitwise}; max N*|error| shown as residual"),
    ))
}

/// 6. Expansion accuracy at x = 30..60 and visible divergence at x = 10.
pub fn expansion(grid: &[ProductParams], tolerance: f64) -> Result<Criterion> {
    let mut worst: f64 = 0.0;
    let mut divergent_points = 0;
    for &p in grid {
        let log_a = log_constant_closed_form(p, ProductKind::Gamma)?;
        for x in 30..=60u64 {
            let exact = log_product(ProductKind::Gamma, p, x)?.log_value;
            worst = worst.max((em_log_gamma_form(p, x, DEFAULT_ORDER, log_a)? - exact).abs());
        }
        let errors = expansion_errors(p, 10, MAX_ORDER)?;
        let best = errors.iter().copied().fold(f64::INFINITY, f64::min);
        if errors[MAX_ORDER] > best {
            divergent_points += 1;
        }
    }
    Ok(verdict(
        6,
        "euler-maclaurin accuracy",
        worst,
        tolerance,
        divergent_points > 0,
        format!("error non-monotone in K at x = 10 for {divergent_points} points"),
    ))
}

/// 7. Constants at `a = b = 1`, agreement of both provenances, and the four relations.
pub fn constants(grid: &[ProductParams], tolerance: f64, relation_tolerance: f64) -> Result<Criterion> {
    let unit = ProductParams::new(1.0, 1.0)?;
    let targets = [
        (ProductKind::Gamma, (2.0 * std::f64::consts::PI).sqrt()),
        (ProductKind::Delta, (2.0 * std::f64::consts::E).sqrt()),
        (ProductKind::Theta, std::f64::consts::PI.sqrt()),
    ];
    let mut worst: f64 = 0.0;
    for (kind, target) in targets {
        let fit = constant_limit_fit(unit, kind, DEFAULT_X_REF, DEFAULT_ORDER)?;
        worst = worst.max((fit - target).abs());
    }
    let mut worst_relation: f64 = 0.0;
    for &p in grid {
        let mut fitted = [0.0; 3];
        for (slot, kind) in fitted.iter_mut().zip(ProductKind::ALL) {
            *slot = constant_limit_fit(p, kind, DEFAULT_X_REF, DEFAULT_ORDER)?;
            worst = worst.max(rel(*slot, constant_closed_form(p, kind)?));
        }
        let k = half_index_delta(p, HalfIndexRoute::QuadratureRatio)?;
        worst_relation =
            worst_relation.max(RelationResiduals::compute(fitted[0], fitted[1], fitted[2], k).max());
    }
    Ok(verdict(
        7,
        "asymptotic constants",
        worst.max(worst_relation * tolerance / relation_tolerance),
        tolerance,
        worst_relation <= relation_tolerance,
        format!("max provenance gap {worst:e}, max relation residual {worst_relation:e}"),
    ))
}

/// 8. `(2k+1)|B_{2k}|` for k = 1..5.
pub fn coefficient_table() -> Result<Criterion> {
    let expected = [(1, 2), (1, 6), (1, 6), (3, 10), (5, 6)];
    let mut ok = true;
    for (k, (n, d)) in expected.into_iter().enumerate() {
        ok &= euler_coefficient(k + 1)? == Rational::new(n, d);
    }
    Ok(verdict(
        8,
        "coefficient table",
        0.0,
        0.0,
        ok,
        "1/2, 1/6, 1/6, 3/10, 5/6".to_string(),
    ))
}

/// 9. `(1 + 1/(2i))^i → √e`, monotonically.
pub fn exp_half(tolerance: f64) -> Result<Criterion> {
    let sqrt_e = 0.5f64.exp();
    let err = (exp_half_limit(1_000_000)? - sqrt_e).abs();
    let samples: Vec<u64> = (1..=100).chain((3..=7).map(|e| 10u64.pow(e))).collect();
    let values = samples
        .iter()
        .map(|&i| exp_half_limit(i))
        .collect::<Result<Vec<_>>>()?;
    let monotone = values.windows(2).all(|w| w[1] > w[0]);
    Ok(verdict(
        9,
        "exp(1/2) limit",
        err,
        tolerance,
        monotone,
        format!("monotone over {} samples: {monotone}", samples.len()),
    ))
}
