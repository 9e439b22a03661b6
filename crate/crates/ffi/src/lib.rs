//! C ABI over `stepprod`.
//!
//! Conventions:
//!
//! * Every fallible function returns a [`StepprodStatus`] and writes its
//!   result through an out-pointer. Out-pointers are left untouched on failure.
//! * Parameter sets, Bernoulli tables and convergence reports are opaque
//!   handles created by `*_new` (or [`stepprod_converge`]) and released with the
//!   matching `*_free`. Passing NULL to a `*_free` function is a no-op.
//! * On failure a human-readable message is available from
//!   [`stepprod_last_error_message`] on the same thread.
//! * Strings returned by the library are released with [`stepprod_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use stepprod::asymptotics::{exp_half_limit, verify_constant_relations};
use stepprod::bernoulli::{bernoulli_numbers, BernoulliTable, Rational};
use stepprod::interpolation::{half_index_values, HalfIndexRoute};
use stepprod::products::{log_product, product, splitting_identity_residual};
use stepprod::quadrature::{beta_integral, lgamma_oracle, BetaIntegral, GeneralBetaSpec, Route};
use stepprod::wallis::{
    converge, general_ratio_partial, kk_partial, wallis_partial, ConvergenceReport, ProductSource,
};
use stepprod::{Error, ProductKind, ProductParams};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepprodStatus {
    Ok = 0,
    NullPointer = 1,
    Validation = 2,
    Domain = 3,
    Range = 4,
    Convergence = 5,
    Integrity = 6,
    Panic = 7,
}

/// Product family.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepprodForm {
    Gamma = 0,
    Delta = 1,
    Theta = 2,
}

impl From<StepprodForm> for ProductKind {
    fn from(f: StepprodForm) -> Self {
        match f {
            StepprodForm::Gamma => ProductKind::Gamma,
            StepprodForm::Delta => ProductKind::Delta,
            StepprodForm::Theta => ProductKind::Theta,
        }
    }
}

/// Quadrature route.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepprodRoute {
    Transformed = 0,
    ClosedForm = 1,
}

/// Route for the half-index value k.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepprodHalfIndexRoute {
    QuadratureRatio = 0,
    GammaOracle = 1,
}

/// Opaque pair (a, b).
pub struct StepprodParams(ProductParams);

/// Opaque table of exact Bernoulli numbers.
pub struct StepprodBernoulliTable(BernoulliTable);

/// Opaque convergence report.
pub struct StepprodConvergenceReport(ConvergenceReport);

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct StepprodQuadrature {
    pub value: f64,
    pub error_estimate: f64,
    pub evaluations: u64,
    /// 0 = transformed, 1 = closed form.
    pub route: u32,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct StepprodHalfIndex {
    pub k: f64,
    pub theta_half: f64,
    pub gamma_half: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct StepprodConvergencePoint {
    pub terms: u64,
    pub partial: f64,
    pub abs_error: f64,
}

/// Fitted constants with their closed-form counterparts and relation residuals.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct StepprodConstants {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub k: f64,
    pub closed_a: f64,
    pub closed_b: f64,
    pub closed_c: f64,
    pub provenance_gap: f64,
    /// A e^(1/2) = B C
    pub residual_a_sqrt_e_eq_bc: f64,
    /// B = C k e^(1/2)
    pub residual_b_eq_ck_sqrt_e: f64,
    /// C = sqrt(A/k)
    pub residual_c_eq_sqrt_a_over_k: f64,
    /// B = sqrt(k A e)
    pub residual_b_eq_sqrt_kae: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(msg: String) {
    let msg = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = msg);
}

fn status_of(e: &Error) -> StepprodStatus {
    match e {
        Error::Validation(_) => StepprodStatus::Validation,
        Error::Domain(_) => StepprodStatus::Domain,
        Error::Range(_) => StepprodStatus::Range,
        Error::Convergence { .. } => StepprodStatus::Convergence,
        Error::Integrity { .. } => StepprodStatus::Integrity,
    }
}

enum Fail {
    Null(&'static str),
    Lib(Error),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Lib(e)
    }
}

/// Runs `body`, converting errors and panics into status codes.
fn guard(body: impl FnOnce() -> Result<(), Fail>) -> StepprodStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => StepprodStatus::Ok,
        Ok(Err(Fail::Null(what))) => {
            set_last_error(format!("{what} is NULL"));
            StepprodStatus::NullPointer
        }
        Ok(Err(Fail::Lib(e))) => {
            set_last_error(e.to_string());
            status_of(&e)
        }
        Err(_) => {
            set_last_error("internal panic".to_string());
            StepprodStatus::Panic
        }
    }
}

/// # Safety
/// `ptr` must be NULL or valid for reads of `T`.
unsafe fn read<'a, T>(ptr: *const T, what: &'static str) -> Result<&'a T, Fail> {
    ptr.as_ref().ok_or(Fail::Null(what))
}

/// # Safety
/// `ptr` must be NULL or valid for writes of `T`.
unsafe fn write<T>(ptr: *mut T, what: &'static str, value: T) -> Result<(), Fail> {
    if ptr.is_null() {
        return Err(Fail::Null(what));
    }
    ptr.write(value);
    Ok(())
}

fn check_out<T>(ptr: *mut T, what: &'static str) -> Result<(), Fail> {
    if ptr.is_null() {
        Err(Fail::Null(what))
    } else {
        Ok(())
    }
}

/// Message describing the most recent failure on this thread. Owned by the
/// library; valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn stepprod_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Releases a string returned by this library.
///
/// # Safety
/// `s` must be NULL or a pointer obtained from this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn stepprod_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

// ---------------------------------------------------------------------------
// parameters and finite products

/// Creates a parameter handle; both values must be finite and positive.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn stepprod_params_new(
    a: f64,
    b: f64,
    out: *mut *mut StepprodParams,
) -> StepprodStatus {
    guard(|| {
        check_out(out, "out")?;
        let params = ProductParams::new(a, b)?;
        write(out, "out", Box::into_raw(Box::new(StepprodParams(params))))
    })
}

/// # Safety
/// `params` must be NULL or a handle from [`stepprod_params_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn stepprod_params_free(params: *mut StepprodParams) {
    if !params.is_null() {
        drop(Box::from_raw(params));
    }
}

/// Direct product of `n` factors. Fails with `RANGE` on overflow.
///
/// # Safety
/// `params` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn stepprod_product(
    params: *const StepprodParams,
    form: StepprodForm,
    n: u64,
    out: *mut f64,
) -> StepprodStatus {
    guard(|| {
        let p = read(params, "params")?;
        check_out(out, "out")?;
        write(out, "out", product(form.into(), p.0, n)?)
    })
}

/// Natural log of the product of `n` factors.
///
/// # Safety
/// `params` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn stepprod_log_product(
    params: *const StepprodParams,
    form: StepprodForm,
    n: u64,
    out: *mut f64,
) -> StepprodStatus {
    guard(|| {
        let p = read(params, "params")?;
        check_out(out, "out")?;
        write(out, "out", log_product(form.into(), p.0, n)?.log_value)
    })
}

/// `log Γ:2n − log Δ:n − log Θ:n`.
///
/// # Safety
/// `params` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn stepprod_splitting_residual(
    params: *const StepprodParams,
    n: u64,
    out: *mut f64,
) -> StepprodStatus {
    guard(|| {
        let p = read(params, "params")?;
        check_out(out, "out")?;
        write(out, "out", splitting_identity_residual(p.0, n)?)
    })
}

// ---------------------------------------------------------------------------
// quadrature and interpolation

/// Natural log of the gamma function for `z > 0`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn stepprod_lgamma(z: f64, out: *mut f64) -> StepprodStatus {
    guard(|| {
        check_out(out, "out")?;
        write(out, "out", lgamma_oracle(z)?)
    })
}

/// `∫_0^1 x^(p-1) (1-x^n)^(m/n-1) dx`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn stepprod_beta_integral(
    p: f64,
    m: f64,
    n: f64,
    route: StepprodRoute,
    out: *mut StepprodQuadrature,
) -> StepprodStatus {
    guard(|| {
        check_out(out, "out")?;
        let route = match route {
            StepprodRoute::Transformed => Route::Transformed,
            StepprodRoute::ClosedForm => Route::ClosedForm,
        };
        let r = beta_integral(&BetaIntegral::new(p, m, n)?, route)?;
        write(
            out,
            "out",
            StepprodQuadrature {
                value: r.value,
                error_estimate: r.error_estimate,
                evaluations: r.evaluations,
                route: match r.route {
                    Route::Transformed => 0,
                    Route::ClosedForm => 1,
                },
            },
        )
    })
}

/// `k = Δ:½`, `Θ:½` and `Γ:½`.
///
/// # Safety
/// `params` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn stepprod_half_index(
    params: *const StepprodParams,
    route: StepprodHalfIndexRoute,
    out: *mut StepprodHalfIndex,
) -> StepprodStatus {
    guard(|| {
        let p = read(params, "params")?;
        check_out(out, "out")?;
        let route = match route {
            StepprodHalfIndexRoute::QuadratureRatio => HalfIndexRoute::QuadratureRatio,
            StepprodHalfIndexRoute::GammaOracle => HalfIndexRoute::GammaOracle,
        };
        let v = half_index_values(p.0, route)?;
        write(
            out,
            "out",
            StepprodHalfIndex {
                k: v.k,
                theta_half: v.theta_half,
                gamma_half: v.gamma_half,
            },
        )
    })
}

// ---------------------------------------------------------------------------
// infinite products

/// Partial Wallis-type product with `terms` members.
///
/// # Safety
/// `params` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn stepprod_wallis_partial(
    params: *const StepprodParams,
    terms: u64,
    out: *mut f64,
) -> StepprodStatus {
    guard(|| {
        let p = read(params, "params")?;
        check_out(out, "out")?;
        write(out, "out", wallis_partial(p.0, terms)?)
    })
}

/// Truncated product for `k² = aP/Q`.
///
/// # Safety
/// `params` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn stepprod_kk_partial(
    params: *const StepprodParams,
    terms: u64,
    out: *mut f64,
) -> StepprodStatus {
    guard(|| {
        let p = read(params, "params")?;
        check_out(out, "out")?;
        write(out, "out", kk_partial(p.0, terms)?)
    })
}

/// Partial four-parameter product.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn stepprod_general_ratio_partial(
    p: f64,
    q: f64,
    m: f64,
    n: f64,
    terms: u64,
    out: *mut f64,
) -> StepprodStatus {
    guard(|| {
        check_out(out, "out")?;
        let spec = GeneralBetaSpec::new(p, q, m, n)?;
        write(out, "out", general_ratio_partial(&spec, terms)?)
    })
}

/// Evaluates the Wallis-type product on a strictly increasing schedule.
///
/// # Safety
/// `params` must be a live handle, `schedule` must point to `len` readable
/// values and `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn stepprod_converge(
    params: *const StepprodParams,
    schedule: *const u64,
    len: usize,
    out: *mut *mut StepprodConvergenceReport,
) -> StepprodStatus {
    guard(|| {
        let p = read(params, "params")?;
        check_out(out, "out")?;
        if schedule.is_null() {
            return Err(Fail::Null("schedule"));
        }
        let schedule = std::slice::from_raw_parts(schedule, len);
        let report = converge(ProductSource::Wallis(p.0), schedule)?;
        write(
            out,
            "out",
            Box::into_raw(Box::new(StepprodConvergenceReport(report))),
        )
    })
}

/// Number of recorded points; 0 for NULL.
///
/// # Safety
/// `report` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn stepprod_report_len(report: *const StepprodConvergenceReport) -> usize {
    report.as_ref().map_or(0, |r| r.0.partials.len())
}

/// # Safety
/// `report` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn stepprod_report_point(
    report: *const StepprodConvergenceReport,
    index: usize,
    out: *mut StepprodConvergencePoint,
) -> StepprodStatus {
    guard(|| {
        let r = read(report, "report")?;
        check_out(out, "out")?;
        let pt = r.0.partials.get(index).ok_or_else(|| {
            Error::Validation(format!(
                "index {index} out of range for {} points",
                r.0.partials.len()
            ))
        })?;
        write(
            out,
            "out",
            StepprodConvergencePoint {
                terms: pt.terms,
                partial: pt.partial,
                abs_error: pt.abs_error,
            },
        )
    })
}

/// Writes the quadrature limit, the fitted decay rate (NaN when fewer than
/// two tail points were usable) and the envelope constant.
///
/// # Safety
/// `report` must be a live handle; each out-pointer must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn stepprod_report_summary(
    report: *const StepprodConvergenceReport,
    reference: *mut f64,
    fitted_rate: *mut f64,
    envelope_constant: *mut f64,
) -> StepprodStatus {
    guard(|| {
        let r = read(report, "report")?;
        check_out(reference, "reference")?;
        check_out(fitted_rate, "fitted_rate")?;
        check_out(envelope_constant, "envelope_constant")?;
        write(reference, "reference", r.0.reference)?;
        write(fitted_rate, "fitted_rate", r.0.fitted_rate.unwrap_or(f64::NAN))?;
        write(envelope_constant, "envelope_constant", r.0.envelope_constant)
    })
}

/// # Safety
/// `report` must be NULL or a live handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn stepprod_report_free(report: *mut StepprodConvergenceReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

// ---------------------------------------------------------------------------
// asymptotics

/// Fits A, B, C, checks them against the closed form and checks their four
/// relations. Fails with `INTEGRITY` when a check is violated.
///
/// # Safety
/// `params` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn stepprod_constants(
    params: *const StepprodParams,
    out: *mut StepprodConstants,
) -> StepprodStatus {
    guard(|| {
        let p = read(params, "params")?;
        check_out(out, "out")?;
        let c = verify_constant_relations(p.0)?;
        write(
            out,
            "out",
            StepprodConstants {
                a: c.a.value,
                b: c.b.value,
                c: c.c.value,
                k: c.k,
                closed_a: c.closed_form.a,
                closed_b: c.closed_form.b,
                closed_c: c.closed_form.c,
                provenance_gap: c.provenance_gap,
                residual_a_sqrt_e_eq_bc: c.residuals.a_sqrt_e_eq_bc,
                residual_b_eq_ck_sqrt_e: c.residuals.b_eq_ck_sqrt_e,
                residual_c_eq_sqrt_a_over_k: c.residuals.c_eq_sqrt_a_over_k,
                residual_b_eq_sqrt_kae: c.residuals.b_eq_sqrt_kae,
            },
        )
    })
}

/// `(1 + 1/(2i))^i`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn stepprod_exp_half_limit(i: u64, out: *mut f64) -> StepprodStatus {
    guard(|| {
        check_out(out, "out")?;
        write(out, "out", exp_half_limit(i)?)
    })
}

// ---------------------------------------------------------------------------
// Bernoulli numbers

/// Table of `B_0 ..= B_{2K}`, `1 <= K <= 60`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn stepprod_bernoulli_table_new(
    half_index: usize,
    out: *mut *mut StepprodBernoulliTable,
) -> StepprodStatus {
    guard(|| {
        check_out(out, "out")?;
        let table = bernoulli_numbers(half_index)?;
        write(out, "out", Box::into_raw(Box::new(StepprodBernoulliTable(table))))
    })
}

/// # Safety
/// `table` must be NULL or a live handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn stepprod_bernoulli_table_free(table: *mut StepprodBernoulliTable) {
    if !table.is_null() {
        drop(Box::from_raw(table));
    }
}

/// Largest index held by the table; 0 for NULL.
///
/// # Safety
/// `table` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn stepprod_bernoulli_max_index(table: *const StepprodBernoulliTable) -> usize {
    table.as_ref().map_or(0, |t| t.0.max_index())
}

unsafe fn write_rational(
    r: &Rational,
    numerator: *mut *mut c_char,
    denominator: *mut *mut c_char,
) -> Result<(), Fail> {
    check_out(numerator, "numerator")?;
    check_out(denominator, "denominator")?;
    let to_c = |s: String| CString::new(s).expect("decimal digits contain no NUL").into_raw();
    write(numerator, "numerator", to_c(r.numerator().to_string()))?;
    write(denominator, "denominator", to_c(r.denominator().to_string()))
}

/// `B_n` as decimal numerator and denominator strings, each released with
/// [`stepprod_string_free`].
///
/// # Safety
/// `table` must be a live handle; the out-pointers must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn stepprod_bernoulli_get(
    table: *const StepprodBernoulliTable,
    n: usize,
    numerator: *mut *mut c_char,
    denominator: *mut *mut c_char,
) -> StepprodStatus {
    guard(|| {
        let t = read(table, "table")?;
        let value = t.0.get(n).ok_or_else(|| {
            Error::Validation(format!("index {n} beyond table maximum {}", t.0.max_index()))
        })?;
        write_rational(value, numerator, denominator)
    })
}

/// `(2k+1)|B_{2k}|` as decimal numerator and denominator strings.
///
/// # Safety
/// `table` must be a live handle; the out-pointers must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn stepprod_euler_coefficient(
    table: *const StepprodBernoulliTable,
    k: usize,
    numerator: *mut *mut c_char,
    denominator: *mut *mut c_char,
) -> StepprodStatus {
    guard(|| {
        let t = read(table, "table")?;
        let value = t.0.euler_coefficient(k)?;
        write_rational(&value, numerator, denominator)
    })
}
