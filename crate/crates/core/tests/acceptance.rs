//! Acceptance criteria 1-10, each at its stated tolerance and runtime budget.
//!
//! Runs without the libtest harness so that one line per criterion is always
//! printed. Exits nonzero when any criterion fails.

use std::f64::consts::{E, FRAC_2_PI, FRAC_PI_2, PI};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use stepprod::asymptotics::{
    constant_closed_form, constant_limit_fit, em_log_gamma_form, exp_half_limit, expansion_errors,
    log_constant_closed_form, RelationResiduals, DEFAULT_ORDER, DEFAULT_X_REF, MAX_ORDER,
};
use stepprod::bernoulli::{euler_coefficient, Rational};
use stepprod::interpolation::{half_index_delta, half_index_theta, HalfIndexRoute};
use stepprod::products::log_product;
use stepprod::quadrature::{
    beta_integral, p_integral, q_integral, reduction_residual, GeneralBetaSpec, Route,
};
use stepprod::wallis::{
    converge, general_ratio_member, general_ratio_partial, wallis_member, wallis_partial, ProductSource,
};
use stepprod::{ProductKind, ProductParams, Result};

/// {0.5, 1, 1.5, 2, 3.7} x {0.5, 1, 2}.
fn grid() -> Vec<ProductParams> {
    let mut g = Vec::new();
    for a in [0.5, 1.0, 1.5, 2.0, 3.7] {
        for b in [0.5, 1.0, 2.0] {
            g.push(ProductParams::new(a, b).unwrap());
        }
    }
    g
}

fn rel(x: f64, y: f64) -> f64 {
    (x - y).abs() / y.abs()
}

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Result<Outcome> {
    Ok(Outcome { passed, detail })
}

fn criterion_1() -> Result<Outcome> {
    let mut worst: f64 = 0.0;
    for p in grid() {
        for n in 0..=50 {
            let g = log_product(ProductKind::Gamma, p, 2 * n)?.log_value;
            let d = log_product(ProductKind::Delta, p, n)?.log_value;
            let t = log_product(ProductKind::Theta, p, n)?.log_value;
            worst = worst.max((g - d - t).abs() / (1.0 + g.abs()));
        }
    }
    outcome(
        worst <= 1e-12,
        format!("max scaled residual {worst:.3e} (tol 1e-12)"),
    )
}

fn criterion_2() -> Result<Outcome> {
    let unit = ProductParams::new(1.0, 1.0)?;
    let mut worst: f64 = 0.0;
    for route in [Route::Transformed, Route::ClosedForm] {
        let p = p_integral(unit, route)?.value;
        let q = q_integral(unit, route)?.value;
        worst = worst.max((p - 1.0).abs()).max((q - FRAC_PI_2).abs());
        worst = worst.max(((p / q).sqrt() - FRAC_2_PI.sqrt()).abs());
    }
    let report = converge(ProductSource::Wallis(unit), &[1_000, 10_000, 100_000])?;
    let bracket = report.partials.iter().all(|pt| {
        let n = pt.terms as f64;
        pt.abs_error >= 0.01 / n && pt.abs_error <= 100.0 / n
    });
    let rate = report.fitted_rate.unwrap_or(f64::NAN);
    let rate_ok = (rate - 1.0).abs() <= 0.1;
    outcome(
        worst <= 1e-10 && bracket && rate_ok,
        format!("max quadrature/k error {worst:.3e} (tol 1e-10); errors within [0.01/N, 100/N]: {bracket}; fitted rate {rate:.4}"),
    )
}

fn criterion_3() -> Result<Outcome> {
    let (mut route_gap, mut product_gap): (f64, f64) = (0.0, 0.0);
    for p in grid() {
        let quad = half_index_delta(p, HalfIndexRoute::QuadratureRatio)?;
        let oracle = half_index_delta(p, HalfIndexRoute::GammaOracle)?;
        route_gap = route_gap.max(rel(quad, oracle));
        product_gap = product_gap.max(rel(quad * half_index_theta(p)?, p.a()));
    }
    outcome(
        route_gap <= 1e-10 && product_gap <= 1e-10,
        format!("route gap {route_gap:.3e}, k*theta_half vs a {product_gap:.3e} (tol 1e-10)"),
    )
}

fn criterion_4() -> Result<Outcome> {
    let mut worst: f64 = 0.0;
    for p in grid() {
        let q = q_integral(p, Route::ClosedForm)?.value;
        worst = worst.max(reduction_residual(p)?.abs() / q);
    }
    outcome(worst <= 1e-10, format!("max residual/Q {worst:.3e} (tol 1e-10)"))
}

fn criterion_5() -> Result<Outcome> {
    const N: u64 = 10_000;
    let mut bitwise = true;
    for p in grid() {
        let spec = GeneralBetaSpec::new(p.a() + p.b(), p.a(), p.b(), 2.0 * p.b())?;
        let (mut general, mut wallis) = (1.0f64, 1.0f64);
        for j in 0..N {
            general *= general_ratio_member(&spec, j);
            wallis *= wallis_member(p, j + 1)?;
            bitwise &= general.to_bits() == wallis.to_bits();
        }
        for terms in [0, 1, 7, 100, 4_321, N] {
            bitwise &= general_ratio_partial(&spec, terms)?.to_bits() == wallis_partial(p, terms)?.to_bits();
        }
    }
    let specs = [
        GeneralBetaSpec::new(1.0, 2.0, 1.0, 2.0)?,
        GeneralBetaSpec::new(1.5, 0.7, 1.0, 3.0)?,
        GeneralBetaSpec::new(2.5, 1.0, 0.5, 1.0)?,
    ];
    let mut worst: f64 = 0.0;
    for spec in specs {
        let num = beta_integral(&spec.numerator(), Route::ClosedForm)?.value;
        let den = beta_integral(&spec.denominator(), Route::ClosedForm)?.value;
        worst = worst.max((general_ratio_partial(&spec, N)? - num / den).abs() * N as f64);
    }
    outcome(
        bitwise && worst <= 100.0,
        format!("bitwise equal for N <= 1e4: {bitwise}; max N*|error| {worst:.3e} (bound 100)"),
    )
}

fn criterion_6() -> Result<Outcome> {
    let mut worst: f64 = 0.0;
    let mut divergent = 0;
    for p in grid() {
        let log_a = log_constant_closed_form(p, ProductKind::Gamma)?;
        for x in 30..=60 {
            let exact = log_product(ProductKind::Gamma, p, x)?.log_value;
            worst = worst.max((em_log_gamma_form(p, x, DEFAULT_ORDER, log_a)? - exact).abs());
        }
        let errors = expansion_errors(p, 10, MAX_ORDER)?;
        let non_monotone = errors.windows(2).any(|w| w[1] > w[0]);
        if non_monotone {
            divergent += 1;
        }
    }
    outcome(
        worst <= 1e-12 && divergent > 0,
        format!(
            "max abs error {worst:.3e} (tol 1e-12); error non-monotone in K at x = 10 for {divergent} points"
        ),
    )
}

fn criterion_7() -> Result<Outcome> {
    let unit = ProductParams::new(1.0, 1.0)?;
    let mut unit_err: f64 = 0.0;
    for (kind, target) in [
        (ProductKind::Gamma, (2.0 * PI).sqrt()),
        (ProductKind::Delta, (2.0 * E).sqrt()),
        (ProductKind::Theta, PI.sqrt()),
    ] {
        unit_err =
            unit_err.max((constant_limit_fit(unit, kind, DEFAULT_X_REF, DEFAULT_ORDER)? - target).abs());
    }
    let (mut provenance, mut relations): (f64, f64) = (0.0, 0.0);
    for p in grid() {
        let mut fitted = [0.0; 3];
        for (slot, kind) in fitted.iter_mut().zip(ProductKind::ALL) {
            *slot = constant_limit_fit(p, kind, DEFAULT_X_REF, DEFAULT_ORDER)?;
            provenance = provenance.max(rel(*slot, constant_closed_form(p, kind)?));
        }
        let k = half_index_delta(p, HalfIndexRoute::QuadratureRatio)?;
        relations = relations.max(RelationResiduals::compute(fitted[0], fitted[1], fitted[2], k).max());
    }
    outcome(
        unit_err <= 1e-9 && provenance <= 1e-9 && relations <= 1e-8,
        format!("a=b=1 error {unit_err:.3e}, provenance gap {provenance:.3e} (tol 1e-9); relations {relations:.3e} (tol 1e-8)"),
    )
}

fn criterion_8() -> Result<Outcome> {
    let expected = [(1, 2), (1, 6), (1, 6), (3, 10), (5, 6)];
    let mut got = Vec::new();
    let mut ok = true;
    for (k, (n, d)) in expected.into_iter().enumerate() {
        let c = euler_coefficient(k + 1)?;
        ok &= c == Rational::new(n, d);
        got.push(c.to_string());
    }
    outcome(ok, format!("coefficients {}", got.join(", ")))
}

fn criterion_9() -> Result<Outcome> {
    let err = (exp_half_limit(1_000_000)? - 0.5f64.exp()).abs();
    let samples: Vec<u64> = (1..=200)
        .chain([500, 1_000, 10_000, 100_000, 1_000_000, 10_000_000])
        .collect();
    let values = samples
        .iter()
        .map(|&i| exp_half_limit(i))
        .collect::<Result<Vec<_>>>()?;
    let monotone = values.windows(2).all(|w| w[1] > w[0]);
    outcome(
        err <= 1e-6 && monotone,
        format!(
            "|value(1e6) - sqrt(e)| {err:.3e} (tol 1e-6); monotone over {} samples: {monotone}",
            samples.len()
        ),
    )
}

fn criterion_10() -> Result<Outcome> {
    let output = Command::new(env!("CARGO_BIN_EXE_stepprod"))
        .args(["verify", "--grid", "default"])
        .output()
        .expect("spawn stepprod");
    let code = output.status.code();
    let record: serde_json::Value = serde_json::from_slice(&output.stdout).expect("verify emits JSON");
    let criteria = record["outputs"]["criteria"]
        .as_array()
        .cloned()
        .unwrap_or_default();
    let ids: Vec<u64> = criteria.iter().filter_map(|c| c["id"].as_u64()).collect();
    let passed = criteria.iter().filter(|c| c["passed"] == true).count();
    outcome(
        code == Some(0) && ids == (1..=9).collect::<Vec<_>>() && passed == 9,
        format!("exit code {code:?}; criteria {ids:?}; {passed}/9 reported passed"),
    )
}

type Check = fn() -> Result<Outcome>;

fn main() -> ExitCode {
    let checks: [(&str, Check, Duration); 10] = [
        ("exact splitting identity", criterion_1, Duration::from_secs(1)),
        ("wallis case", criterion_2, Duration::from_secs(5)),
        ("interpolation identities", criterion_3, Duration::from_secs(5)),
        ("integral reduction", criterion_4, Duration::from_secs(2)),
        ("four-parameter duality", criterion_5, Duration::from_secs(5)),
        ("euler-maclaurin accuracy", criterion_6, Duration::from_secs(2)),
        ("constants and relations", criterion_7, Duration::from_secs(5)),
        ("coefficient table", criterion_8, Duration::from_millis(100)),
        ("exp(1/2) limit", criterion_9, Duration::from_millis(100)),
        ("end-to-end verify", criterion_10, Duration::from_secs(60)),
    ];
    let mut failures = 0;
    for (i, (name, check, budget)) in checks.into_iter().enumerate() {
        let start = Instant::now();
        let result = check();
        let elapsed = start.elapsed();
        let (passed, detail) = match result {
            Ok(o) => (o.passed && elapsed <= budget, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        if !passed {
            failures += 1;
        }
        println!(
            "criterion {:>2} {} {name}: {detail}; {:.3} s (budget {:.3} s)",
            i + 1,
            if passed { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64(),
            budget.as_secs_f64(),
        );
    }
    println!("acceptance: {} passed, {failures} failed", 10 - failures);
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
