use std::ffi::{c_char, CStr};
use std::ptr;

use stepprod_ffi::*;

fn params(a: f64, b: f64) -> *mut StepprodParams {
    let mut out = ptr::null_mut();
    let status = unsafe { stepprod_params_new(a, b, &mut out) };
    assert_eq!(status, StepprodStatus::Ok);
    assert!(!out.is_null());
    out
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(stepprod_last_error_message()) }
        .to_string_lossy()
        .into_owned()
}

unsafe fn take_string(s: *mut c_char) -> String {
    let owned = CStr::from_ptr(s).to_string_lossy().into_owned();
    stepprod_string_free(s);
    owned
}

#[test]
fn product_values_and_overflow() {
    let p = params(1.0, 1.0);
    let mut v = 0.0;
    unsafe {
        assert_eq!(
            stepprod_product(p, StepprodForm::Gamma, 5, &mut v),
            StepprodStatus::Ok
        );
        assert_eq!(v, 120.0);
        assert_eq!(
            stepprod_product(p, StepprodForm::Delta, 3, &mut v),
            StepprodStatus::Ok
        );
        assert_eq!(v, 15.0);
        assert_eq!(
            stepprod_product(p, StepprodForm::Theta, 3, &mut v),
            StepprodStatus::Ok
        );
        assert_eq!(v, 48.0);

        let before = v;
        assert_eq!(
            stepprod_product(p, StepprodForm::Gamma, 200, &mut v),
            StepprodStatus::Range
        );
        assert_eq!(v, before);
        assert!(!last_error().is_empty());

        assert_eq!(
            stepprod_log_product(p, StepprodForm::Gamma, 200, &mut v),
            StepprodStatus::Ok
        );
        assert!((v - 863.231_987_192_516_4).abs() < 1e-9);

        assert_eq!(stepprod_splitting_residual(p, 50, &mut v), StepprodStatus::Ok);
        assert!(v.abs() < 1e-12);
        stepprod_params_free(p);
    }
}

#[test]
fn invalid_params_and_null_pointers() {
    let mut out = ptr::null_mut();
    unsafe {
        assert_eq!(
            stepprod_params_new(-1.0, 1.0, &mut out),
            StepprodStatus::Validation
        );
        assert!(out.is_null());
        assert_eq!(
            stepprod_params_new(1.0, f64::NAN, &mut out),
            StepprodStatus::Validation
        );
        assert_eq!(
            stepprod_params_new(1.0, 1.0, ptr::null_mut()),
            StepprodStatus::NullPointer
        );
        assert!(last_error().contains("NULL"));

        let mut v = 0.0;
        assert_eq!(
            stepprod_product(ptr::null(), StepprodForm::Gamma, 1, &mut v),
            StepprodStatus::NullPointer
        );
        stepprod_params_free(ptr::null_mut());
        stepprod_report_free(ptr::null_mut());
        stepprod_bernoulli_table_free(ptr::null_mut());
        stepprod_string_free(ptr::null_mut());
        assert_eq!(stepprod_report_len(ptr::null()), 0);
        assert_eq!(stepprod_bernoulli_max_index(ptr::null()), 0);
    }
}

#[test]
fn quadrature_routes_agree() {
    let mut t = StepprodQuadrature::default();
    let mut c = StepprodQuadrature::default();
    unsafe {
        assert_eq!(
            stepprod_beta_integral(1.0, 1.0, 2.0, StepprodRoute::Transformed, &mut t),
            StepprodStatus::Ok
        );
        assert_eq!(
            stepprod_beta_integral(1.0, 1.0, 2.0, StepprodRoute::ClosedForm, &mut c),
            StepprodStatus::Ok
        );
    }
    assert!((t.value - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
    assert!((t.value - c.value).abs() < 1e-12);
    assert_eq!(t.route, 0);
    assert_eq!(c.route, 1);
    assert!(t.evaluations > 0);

    unsafe {
        assert_eq!(
            stepprod_beta_integral(1.0, 3.0, 2.0, StepprodRoute::Transformed, &mut t),
            StepprodStatus::Validation
        );
        assert_eq!(
            stepprod_beta_integral(0.0, 1.0, 2.0, StepprodRoute::Transformed, &mut t),
            StepprodStatus::Domain
        );
        let mut lg = 0.0;
        assert_eq!(stepprod_lgamma(5.0, &mut lg), StepprodStatus::Ok);
        assert!((lg - 24f64.ln()).abs() < 1e-13);
        assert_eq!(stepprod_lgamma(-1.0, &mut lg), StepprodStatus::Domain);
    }
}

#[test]
fn half_index_at_unit_params() {
    let p = params(1.0, 1.0);
    let mut q = StepprodHalfIndex::default();
    let mut o = StepprodHalfIndex::default();
    unsafe {
        assert_eq!(
            stepprod_half_index(p, StepprodHalfIndexRoute::QuadratureRatio, &mut q),
            StepprodStatus::Ok
        );
        assert_eq!(
            stepprod_half_index(p, StepprodHalfIndexRoute::GammaOracle, &mut o),
            StepprodStatus::Ok
        );
        stepprod_params_free(p);
    }
    let sqrt_pi = std::f64::consts::PI.sqrt();
    assert!((q.k - std::f64::consts::FRAC_2_PI.sqrt()).abs() < 1e-12);
    assert!((q.k - o.k).abs() < 1e-10);
    assert!((q.theta_half - std::f64::consts::FRAC_PI_2.sqrt()).abs() < 1e-12);
    assert!((q.gamma_half - sqrt_pi / 2.0).abs() < 1e-12);
}

#[test]
fn infinite_products_and_report() {
    let p = params(1.0, 1.0);
    let mut w = 0.0;
    let mut kk = 0.0;
    let mut g = 0.0;
    unsafe {
        assert_eq!(stepprod_wallis_partial(p, 1000, &mut w), StepprodStatus::Ok);
        assert_eq!(stepprod_kk_partial(p, 1000, &mut kk), StepprodStatus::Ok);
        assert_eq!(
            stepprod_general_ratio_partial(2.0, 1.0, 1.0, 2.0, 1000, &mut g),
            StepprodStatus::Ok
        );
    }
    let limit = std::f64::consts::FRAC_2_PI;
    assert!(w > limit && w - limit < 1e-3);
    assert_eq!(w, g);
    assert!(kk < limit && limit - kk < 1e-3);

    let schedule = [10u64, 100, 1000, 10_000];
    let mut report = ptr::null_mut();
    unsafe {
        assert_eq!(
            stepprod_converge(p, schedule.as_ptr(), schedule.len(), &mut report),
            StepprodStatus::Ok
        );
        assert_eq!(stepprod_report_len(report), 4);
        let mut pt = StepprodConvergencePoint::default();
        assert_eq!(stepprod_report_point(report, 2, &mut pt), StepprodStatus::Ok);
        assert_eq!(pt.terms, 1000);
        assert_eq!(pt.partial, w);
        assert_eq!(
            stepprod_report_point(report, 4, &mut pt),
            StepprodStatus::Validation
        );
        let (mut r, mut rate, mut env) = (0.0, 0.0, 0.0);
        assert_eq!(
            stepprod_report_summary(report, &mut r, &mut rate, &mut env),
            StepprodStatus::Ok
        );
        assert!((r - limit).abs() < 1e-12);
        assert!((rate - 1.0).abs() < 0.05);
        assert!(env > 0.0 && env < 1.0);
        stepprod_report_free(report);

        let bad = [10u64, 10];
        let mut none = ptr::null_mut();
        assert_eq!(
            stepprod_converge(p, bad.as_ptr(), bad.len(), &mut none),
            StepprodStatus::Validation
        );
        assert!(none.is_null());
        stepprod_params_free(p);
    }
}

#[test]
fn constants_and_relations() {
    let p = params(1.0, 1.0);
    let mut c = StepprodConstants::default();
    unsafe {
        assert_eq!(stepprod_constants(p, &mut c), StepprodStatus::Ok);
        stepprod_params_free(p);
    }
    let two_pi = 2.0 * std::f64::consts::PI;
    assert!((c.a - two_pi.sqrt()).abs() < 1e-9);
    assert!((c.b - (2.0 * std::f64::consts::E).sqrt()).abs() < 1e-9);
    assert!((c.c - std::f64::consts::PI.sqrt()).abs() < 1e-9);
    assert!((c.closed_a - two_pi.sqrt()).abs() < 1e-13);
    for r in [
        c.residual_a_sqrt_e_eq_bc,
        c.residual_b_eq_ck_sqrt_e,
        c.residual_c_eq_sqrt_a_over_k,
        c.residual_b_eq_sqrt_kae,
    ] {
        assert!(r.abs() < 1e-8);
    }
    assert!(c.provenance_gap < 1e-9);

    let mut e = 0.0;
    unsafe {
        assert_eq!(stepprod_exp_half_limit(1, &mut e), StepprodStatus::Ok);
        assert_eq!(e, 1.5);
        assert_eq!(stepprod_exp_half_limit(0, &mut e), StepprodStatus::Validation);
    }
}

#[test]
fn bernoulli_strings() {
    let mut table = ptr::null_mut();
    unsafe {
        assert_eq!(stepprod_bernoulli_table_new(15, &mut table), StepprodStatus::Ok);
        assert_eq!(stepprod_bernoulli_max_index(table), 30);

        let (mut num, mut den) = (ptr::null_mut(), ptr::null_mut());
        assert_eq!(
            stepprod_bernoulli_get(table, 30, &mut num, &mut den),
            StepprodStatus::Ok
        );
        assert_eq!(take_string(num), "8615841276005");
        assert_eq!(take_string(den), "14322");

        assert_eq!(
            stepprod_bernoulli_get(table, 1, &mut num, &mut den),
            StepprodStatus::Ok
        );
        assert_eq!(take_string(num), "-1");
        assert_eq!(take_string(den), "2");

        assert_eq!(
            stepprod_euler_coefficient(table, 4, &mut num, &mut den),
            StepprodStatus::Ok
        );
        assert_eq!(take_string(num), "3");
        assert_eq!(take_string(den), "10");

        assert_eq!(
            stepprod_bernoulli_get(table, 31, &mut num, &mut den),
            StepprodStatus::Validation
        );
        stepprod_bernoulli_table_free(table);

        let mut none = ptr::null_mut();
        assert_eq!(
            stepprod_bernoulli_table_new(0, &mut none),
            StepprodStatus::Validation
        );
        assert_eq!(
            stepprod_bernoulli_table_new(61, &mut none),
            StepprodStatus::Validation
        );
    }
}

#[test]
fn header_declares_every_export() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/stepprod.h")).unwrap();
    let source = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/src/lib.rs")).unwrap();
    let exports: Vec<&str> = source
        .lines()
        .filter_map(|l| l.split("extern \"C\" fn ").nth(1))
        .map(|rest| rest.split('(').next().unwrap())
        .collect();
    assert!(exports.len() > 20);
    for name in exports {
        assert!(header.contains(&format!("{name}(")), "{name} missing from header");
    }
}
