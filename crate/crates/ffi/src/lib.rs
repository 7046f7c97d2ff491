//! C ABI over `epilab`.
//!
//! Densities are opaque handles created by the `epilab_*` constructors and
//! released with [`epilab_density_free`]. Fallible calls return an
//! [`EpilabStatus`] and write results through out-pointers; the message of the
//! most recent failure on the calling thread is available from
//! [`epilab_last_error`]. Strings returned by the library must be released
//! with [`epilab_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use epilab::convolution::{self, ConvolutionConfig};
use epilab::density::{self, PiecewiseDensity, Sign};
use epilab::entropy::{EntropyEngine, EntropyMethod};
use epilab::experiment::{self, Format};
use epilab::inequalities::{Checker, InequalityVerdict, Status};
use epilab::Error;

/// Opaque density handle.
pub struct EpilabDensity(PiecewiseDensity);

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EpilabStatus {
    Ok = 0,
    NullPointer = 1,
    Domain = 2,
    InfiniteMoment = 3,
    NonFinite = 4,
    ZeroDensity = 5,
    Inconclusive = 6,
    Consistency = 7,
    Usage = 8,
    Io = 9,
    Panic = 10,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EpilabSign {
    Plus = 0,
    Minus = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EpilabFormat {
    Csv = 0,
    Json = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EpilabEntropyMethod {
    ClosedForm = 0,
    Quadrature = 1,
    MonteCarlo = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EpilabVerdictStatus {
    Holds = 0,
    Violated = 1,
    Inconclusive = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpilabEntropy {
    pub h: f64,
    pub log_entropy_power: f64,
    pub abs_error: f64,
    pub method: EpilabEntropyMethod,
    pub converged: bool,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpilabMoments {
    pub mean: f64,
    pub second_moment: f64,
    pub variance: f64,
}

/// Numeric part of a verdict; `lhs <= rhs` is the inequality checked.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpilabVerdict {
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub slack: f64,
    pub status: EpilabVerdictStatus,
}

impl From<&InequalityVerdict> for EpilabVerdict {
    fn from(v: &InequalityVerdict) -> Self {
        Self {
            lhs: v.lhs,
            rhs: v.rhs,
            margin: v.margin,
            slack: v.numeric_slack,
            status: match v.status {
                Status::Holds => EpilabVerdictStatus::Holds,
                Status::Violated => EpilabVerdictStatus::Violated,
                Status::Inconclusive => EpilabVerdictStatus::Inconclusive,
            },
        }
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> EpilabStatus {
    match e {
        Error::Domain(_) => EpilabStatus::Domain,
        Error::InfiniteMoment(_) => EpilabStatus::InfiniteMoment,
        Error::NonFiniteIntegrand { .. } => EpilabStatus::NonFinite,
        Error::ZeroDensity(_) => EpilabStatus::ZeroDensity,
        Error::Inconclusive(_) => EpilabStatus::Inconclusive,
        Error::Consistency(_) => EpilabStatus::Consistency,
        Error::Usage(_) => EpilabStatus::Usage,
        Error::Io(_) => EpilabStatus::Io,
    }
}

enum Failure {
    Null(&'static str),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

/// Runs `f`, translating errors and panics into a status code.
fn guard<F: FnOnce() -> Result<(), Failure>>(f: F) -> EpilabStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            EpilabStatus::Ok
        }
        Ok(Err(Failure::Null(what))) => {
            set_last_error(format!("null pointer: {what}"));
            EpilabStatus::NullPointer
        }
        Ok(Err(Failure::Lib(e))) => {
            set_last_error(e.to_string());
            status_of(&e)
        }
        Err(_) => {
            set_last_error("internal panic".into());
            EpilabStatus::Panic
        }
    }
}

unsafe fn density<'a>(d: *const EpilabDensity, what: &'static str) -> Result<&'a PiecewiseDensity, Failure> {
    d.as_ref().map(|d| &d.0).ok_or(Failure::Null(what))
}

unsafe fn write<T>(out: *mut T, value: T, what: &'static str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure::Null(what));
    }
    out.write(value);
    Ok(())
}

unsafe fn emit_density(out: *mut *mut EpilabDensity, d: epilab::Result<PiecewiseDensity>) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure::Null("out"));
    }
    out.write(ptr::null_mut());
    let boxed = Box::into_raw(Box::new(EpilabDensity(d?)));
    out.write(boxed);
    Ok(())
}

unsafe fn emit_string(out: *mut *mut c_char, s: String) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure::Null("out"));
    }
    let c = CString::new(s).map_err(|e| Error::Io(e.to_string()))?;
    out.write(c.into_raw());
    Ok(())
}

/// Truncated Pareto density `1/(x ln b)` on `(1, b)`, parametrized by `log_b = ln b > 0`.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for a handle.
#[no_mangle]
pub unsafe extern "C" fn epilab_truncated_pareto(log_b: f64, out: *mut *mut EpilabDensity) -> EpilabStatus {
    guard(|| emit_density(out, density::truncated_pareto(log_b)))
}

/// Pareto density `(beta - 1) x^{-beta}` on `(1, ∞)`, `beta > 1`.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for a handle.
#[no_mangle]
pub unsafe extern "C" fn epilab_pareto(beta: f64, out: *mut *mut EpilabDensity) -> EpilabStatus {
    guard(|| emit_density(out, density::pareto(beta)))
}

/// Normal density with mean `mu` and variance `sigma2 > 0`.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for a handle.
#[no_mangle]
pub unsafe extern "C" fn epilab_gaussian(mu: f64, sigma2: f64, out: *mut *mut EpilabDensity) -> EpilabStatus {
    guard(|| emit_density(out, density::gaussian(mu, sigma2)))
}

/// Uniform density on `(a, b)`.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for a handle.
#[no_mangle]
pub unsafe extern "C" fn epilab_uniform(a: f64, b: f64, out: *mut *mut EpilabDensity) -> EpilabStatus {
    guard(|| emit_density(out, density::uniform(a, b)))
}

/// Exponential density with rate `lambda > 0`.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for a handle.
#[no_mangle]
pub unsafe extern "C" fn epilab_exponential(lambda: f64, out: *mut *mut EpilabDensity) -> EpilabStatus {
    guard(|| emit_density(out, density::exponential(lambda)))
}

/// Density of `a X + c`.
///
/// # Safety
/// `d` must be a live handle and `out` valid writable storage.
#[no_mangle]
pub unsafe extern "C" fn epilab_affine(
    d: *const EpilabDensity,
    a: f64,
    c: f64,
    out: *mut *mut EpilabDensity,
) -> EpilabStatus {
    guard(|| {
        let d = density(d, "d")?;
        emit_density(out, density::affine_transform(d, a, c))
    })
}

/// Closed-form density of `X_b + Y_b` for independent truncated Pareto copies.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for a handle.
#[no_mangle]
pub unsafe extern "C" fn epilab_truncated_pareto_sum(log_b: f64, out: *mut *mut EpilabDensity) -> EpilabStatus {
    guard(|| emit_density(out, convolution::sum_density_truncated_pareto(log_b)))
}

/// Closed-form density of `X_b - Y_b` for independent truncated Pareto copies.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for a handle.
#[no_mangle]
pub unsafe extern "C" fn epilab_truncated_pareto_difference(
    log_b: f64,
    out: *mut *mut EpilabDensity,
) -> EpilabStatus {
    guard(|| emit_density(out, convolution::diff_density_truncated_pareto(log_b)))
}

/// Density of `X ± Y` for independent `X ~ d1`, `Y ~ d2`, closed form when known.
///
/// # Safety
/// `d1`, `d2` must be live handles and `out` valid writable storage.
#[no_mangle]
pub unsafe extern "C" fn epilab_convolve(
    d1: *const EpilabDensity,
    d2: *const EpilabDensity,
    sign: EpilabSign,
    out: *mut *mut EpilabDensity,
) -> EpilabStatus {
    guard(|| {
        let (a, b) = (density(d1, "d1")?, density(d2, "d2")?);
        let sign = match sign {
            EpilabSign::Plus => Sign::Plus,
            EpilabSign::Minus => Sign::Minus,
        };
        emit_density(out, convolution::convolve(a, b, sign, ConvolutionConfig::default()))
    })
}

/// Releases a handle. Null is ignored.
///
/// # Safety
/// `d` must be null or a handle from this library that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn epilab_density_free(d: *mut EpilabDensity) {
    if !d.is_null() {
        drop(Box::from_raw(d));
    }
}

/// Density at `x`; NaN for a null handle.
///
/// # Safety
/// `d` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn epilab_pdf(d: *const EpilabDensity, x: f64) -> f64 {
    d.as_ref().map_or(f64::NAN, |d| d.0.pdf(x))
}

/// Distribution function at `x`; NaN for a null handle.
///
/// # Safety
/// `d` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn epilab_cdf(d: *const EpilabDensity, x: f64) -> f64 {
    d.as_ref().map_or(f64::NAN, |d| density::cdf(&d.0, x))
}

/// Essential supremum of the density; NaN for a null handle.
///
/// # Safety
/// `d` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn epilab_sup_density(d: *const EpilabDensity) -> f64 {
    d.as_ref().map_or(f64::NAN, |d| density::sup_density(&d.0))
}

/// Quantile at `u` in `[0, 1]`.
///
/// # Safety
/// `d` must be a live handle and `out` valid writable storage.
#[no_mangle]
pub unsafe extern "C" fn epilab_inverse_cdf(d: *const EpilabDensity, u: f64, out: *mut f64) -> EpilabStatus {
    guard(|| {
        let x = density::inverse_cdf(density(d, "d")?, u)?;
        write(out, x, "out")
    })
}

/// # Safety
/// `d` must be a live handle and `out` valid writable storage.
#[no_mangle]
pub unsafe extern "C" fn epilab_moments(d: *const EpilabDensity, out: *mut EpilabMoments) -> EpilabStatus {
    guard(|| {
        let m = density::moments(density(d, "d")?)?;
        write(
            out,
            EpilabMoments {
                mean: m.mean,
                second_moment: m.second_moment,
                variance: m.variance,
            },
            "out",
        )
    })
}

/// Differential entropy in nats; closed form when available, quadrature to
/// absolute tolerance `tol` otherwise.
///
/// # Safety
/// `d` must be a live handle and `out` valid writable storage.
#[no_mangle]
pub unsafe extern "C" fn epilab_entropy(d: *const EpilabDensity, tol: f64, out: *mut EpilabEntropy) -> EpilabStatus {
    guard(|| {
        let r = EntropyEngine::new(tol).entropy(density(d, "d")?)?;
        write(
            out,
            EpilabEntropy {
                h: r.h,
                log_entropy_power: r.log_entropy_power,
                abs_error: r.abs_error,
                method: match r.method {
                    EntropyMethod::ClosedForm => EpilabEntropyMethod::ClosedForm,
                    EntropyMethod::Quadrature => EpilabEntropyMethod::Quadrature,
                    EntropyMethod::MonteCarlo => EpilabEntropyMethod::MonteCarlo,
                },
                converged: r.converged,
            },
            "out",
        )
    })
}

/// Distance to normality `D(X)`.
///
/// # Safety
/// `d` must be a live handle and `out` valid writable storage.
#[no_mangle]
pub unsafe extern "C" fn epilab_d_to_normality(d: *const EpilabDensity, tol: f64, out: *mut f64) -> EpilabStatus {
    guard(|| {
        let v = EntropyEngine::new(tol).d_to_normality(density(d, "d")?)?;
        write(out, v, "out")
    })
}

/// `H(X) + H(Y) <= H(X + Y)`, compared in log-entropy-power units.
///
/// # Safety
/// `x`, `y` must be live handles and `out` valid writable storage.
#[no_mangle]
pub unsafe extern "C" fn epilab_check_epi(
    x: *const EpilabDensity,
    y: *const EpilabDensity,
    tol: f64,
    out: *mut EpilabVerdict,
) -> EpilabStatus {
    guard(|| {
        let v = Checker::new(tol).check_epi(density(x, "x")?, density(y, "y")?)?;
        write(out, (&v).into(), "out")
    })
}

/// `h(X - Y) <= h(X) + 1` and `h(X + Y) <= h(X) + 2` for a log-concave `X`.
///
/// # Safety
/// `x` must be a live handle; `diff` and `sum` valid writable storage.
#[no_mangle]
pub unsafe extern "C" fn epilab_check_corollary1(
    x: *const EpilabDensity,
    tol: f64,
    diff: *mut EpilabVerdict,
    sum: *mut EpilabVerdict,
) -> EpilabStatus {
    guard(|| {
        let (d, s) = Checker::new(tol).check_corollary1(density(x, "x")?)?;
        write(diff, (&d).into(), "diff")?;
        write(sum, (&s).into(), "sum")
    })
}

/// Lower bounds on `h(X_b ± Y_b)` at `log_b >= 2`, as a JSON array of verdicts.
///
/// # Safety
/// `out` must be valid writable storage; free the result with [`epilab_string_free`].
#[no_mangle]
pub unsafe extern "C" fn epilab_theorem3_bounds_json(log_b: f64, tol: f64, out: *mut *mut c_char) -> EpilabStatus {
    guard(|| {
        let v = Checker::new(tol).check_theorem3_bounds(log_b)?;
        let s = serde_json::to_string(&v).map_err(|e| Error::Io(e.to_string()))?;
        emit_string(out, s)
    })
}

/// The divergence experiment over `t_grid[0..len]`, rendered as CSV or JSON.
///
/// # Safety
/// `t_grid` must point to `len` doubles and `out` be valid writable storage;
/// free the result with [`epilab_string_free`].
#[no_mangle]
pub unsafe extern "C" fn epilab_divergence(
    t_grid: *const f64,
    len: usize,
    tol: f64,
    format: EpilabFormat,
    out: *mut *mut c_char,
) -> EpilabStatus {
    guard(|| {
        if t_grid.is_null() && len > 0 {
            return Err(Failure::Null("t_grid"));
        }
        let grid = if len == 0 { &[][..] } else { std::slice::from_raw_parts(t_grid, len) };
        let rows = experiment::run_divergence_experiment(grid, tol)?;
        let format = match format {
            EpilabFormat::Csv => Format::Csv,
            EpilabFormat::Json => Format::Json,
        };
        emit_string(out, experiment::render(&rows, format)?)
    })
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must be null or a string from this library that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn epilab_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Message of the last failed call on this thread, or null. Valid until the
/// next call into the library on the same thread.
#[no_mangle]
pub extern "C" fn epilab_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}
