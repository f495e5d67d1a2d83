//! C interface to isolab.
//!
//! Every function returns an [`IsolabStatus`]; on failure the message is
//! available from [`isolab_last_error`] on the same thread. Handles are
//! opaque and must be released with their `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use isolab::cli::config::{load_config, parse_config, RunConfig};
use isolab::cli::run::{run, write_outputs, RunResult};
use isolab::{Error, Expr, ImPoint, MobiusMap, Quaternion, ResidualClass};
use num_complex::Complex64;

/// Result codes. Anything other than `Ok` leaves a message for
/// [`isolab_last_error`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IsolabStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Syntax = 3,
    Pole = 4,
    InvalidParameter = 5,
    Config = 6,
    Numerical = 7,
    Io = 8,
    OutOfRange = 9,
    Panic = 10,
}

impl From<&Error> for IsolabStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::Syntax { .. } | Error::UnknownFunction { .. } => IsolabStatus::Syntax,
            Error::Pole { .. } | Error::PoleAtNode { .. } | Error::PoleOnGrid { .. } => {
                IsolabStatus::Pole
            }
            Error::InvalidParameter(_) | Error::GridMismatch => IsolabStatus::InvalidParameter,
            Error::Config { .. } | Error::Validation(_) => IsolabStatus::Config,
            Error::Io(_) => IsolabStatus::Io,
            _ => IsolabStatus::Numerical,
        }
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

/// Message of the last failure on this thread, or null. Valid until the
/// next failing call on the same thread.
#[no_mangle]
pub extern "C" fn isolab_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

struct Failure(IsolabStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(IsolabStatus::from(&e), e.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> IsolabStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => IsolabStatus::Ok,
        Ok(Err(Failure(status, message))) => {
            set_error(message);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            IsolabStatus::Panic
        }
    }
}

fn null(what: &str) -> Failure {
    Failure(IsolabStatus::NullPointer, format!("{what} is null"))
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|e| Failure(IsolabStatus::InvalidUtf8, format!("{what}: {e}")))
}

unsafe fn out_arg<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn ref_arg<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

/// Library version as a static nul-terminated string.
#[no_mangle]
pub extern "C" fn isolab_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// A parsed holomorphic expression in `z`.
pub struct IsolabExpr(Expr);

/// # Safety
/// `text` must be a nul-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn isolab_expr_parse(
    text: *const c_char,
    out: *mut *mut IsolabExpr,
) -> IsolabStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let expr = Expr::parse(str_arg(text, "text")?)?;
        *out = Box::into_raw(Box::new(IsolabExpr(expr)));
        Ok(())
    })
}

/// # Safety
/// `expr` must come from this library; the outputs must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn isolab_expr_eval(
    expr: *const IsolabExpr,
    re: f64,
    im: f64,
    out_re: *mut f64,
    out_im: *mut f64,
) -> IsolabStatus {
    guard(|| {
        let expr = ref_arg(expr, "expr")?;
        let (out_re, out_im) = (out_arg(out_re, "out_re")?, out_arg(out_im, "out_im")?);
        let w = expr.0.eval(Complex64::new(re, im))?;
        *out_re = w.re;
        *out_im = w.im;
        Ok(())
    })
}

/// Symbolic derivative `d/dz` as a new handle.
///
/// # Safety
/// `expr` must come from this library and `out` be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn isolab_expr_derivative(
    expr: *const IsolabExpr,
    out: *mut *mut IsolabExpr,
) -> IsolabStatus {
    guard(|| {
        let expr = ref_arg(expr, "expr")?;
        let out = out_arg(out, "out")?;
        *out = Box::into_raw(Box::new(IsolabExpr(expr.0.derivative())));
        Ok(())
    })
}

/// # Safety
/// `expr` must come from this library or be null; it is invalid afterwards.
#[no_mangle]
pub unsafe extern "C" fn isolab_expr_free(expr: *mut IsolabExpr) {
    if !expr.is_null() {
        drop(Box::from_raw(expr));
    }
}

/// Applies `x ↦ (a x + b)(c x + d)⁻¹` to an imaginary quaternion.
/// `coefficients` holds `a, b, c, d` as `[w, x, y, z]` each. A point sent
/// to infinity yields `IsolabStatus::Pole`.
///
/// # Safety
/// `coefficients` must point to 16 doubles, `point` and `out` to 3.
#[no_mangle]
pub unsafe extern "C" fn isolab_mobius_apply(
    coefficients: *const f64,
    point: *const f64,
    out: *mut f64,
) -> IsolabStatus {
    guard(|| {
        if coefficients.is_null() || point.is_null() || out.is_null() {
            return Err(null("argument"));
        }
        let c = std::slice::from_raw_parts(coefficients, 16);
        let q =
            |k: usize| Quaternion::from_array([c[4 * k], c[4 * k + 1], c[4 * k + 2], c[4 * k + 3]]);
        let map = MobiusMap::new(q(0), q(1), q(2), q(3))?;
        let p = std::slice::from_raw_parts(point, 3);
        let image = map
            .apply_point(ImPoint::new(p[0], p[1], p[2]))?
            .ok_or_else(|| Failure(IsolabStatus::Pole, "point is mapped to infinity".into()))?;
        std::slice::from_raw_parts_mut(out, 3).copy_from_slice(&image.to_array());
        Ok(())
    })
}

/// A validated run configuration.
pub struct IsolabConfig(RunConfig);

unsafe fn boxed_config(out: *mut *mut IsolabConfig, config: RunConfig) -> Result<(), Failure> {
    let out = out_arg(out, "out")?;
    *out = Box::into_raw(Box::new(IsolabConfig(config)));
    Ok(())
}

/// # Safety
/// `json` must be a nul-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn isolab_config_parse(
    json: *const c_char,
    out: *mut *mut IsolabConfig,
) -> IsolabStatus {
    guard(|| boxed_config(out, parse_config(str_arg(json, "json")?)?))
}

/// # Safety
/// `path` must be a nul-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn isolab_config_load(
    path: *const c_char,
    out: *mut *mut IsolabConfig,
) -> IsolabStatus {
    guard(|| boxed_config(out, load_config(Path::new(str_arg(path, "path")?))?))
}

/// # Safety
/// `config` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn isolab_config_free(config: *mut IsolabConfig) {
    if !config.is_null() {
        drop(Box::from_raw(config));
    }
}

/// Results of a run with report names kept alive for C callers.
pub struct IsolabRun {
    result: RunResult,
    names: Vec<CString>,
}

/// Residual classes as integers.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IsolabClass {
    Fd = 0,
    Ode = 1,
    Algebraic = 2,
}

/// One judged residual. `order_estimate` is NaN when only one grid level ran.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct IsolabReport {
    pub kind: IsolabClass,
    pub max: f64,
    pub mean: f64,
    pub spacing: f64,
    pub order_estimate: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// Runs the configured pipeline. Tolerance failures are not errors; check
/// [`isolab_run_passed`].
///
/// # Safety
/// `config` must come from this library and `out` be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn isolab_run(
    config: *const IsolabConfig,
    out: *mut *mut IsolabRun,
) -> IsolabStatus {
    guard(|| {
        let config = ref_arg(config, "config")?;
        let out = out_arg(out, "out")?;
        let result = run(&config.0)?;
        let names = result
            .rows
            .iter()
            .map(|r| CString::new(r.report.name.replace('\0', " ")).expect("nul bytes removed"))
            .collect();
        *out = Box::into_raw(Box::new(IsolabRun { result, names }));
        Ok(())
    })
}

/// Writes the OBJ and CSV outputs requested by `config`.
///
/// # Safety
/// Both handles must come from this library.
#[no_mangle]
pub unsafe extern "C" fn isolab_run_write_outputs(
    config: *const IsolabConfig,
    run: *const IsolabRun,
) -> IsolabStatus {
    guard(|| {
        let config = ref_arg(config, "config")?;
        let run = ref_arg(run, "run")?;
        write_outputs(&config.0, &run.result)?;
        Ok(())
    })
}

/// True when every report is within tolerance. False for a null handle.
///
/// # Safety
/// `run` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn isolab_run_passed(run: *const IsolabRun) -> bool {
    run.as_ref().is_some_and(|r| r.result.passed())
}

/// # Safety
/// `run` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn isolab_run_report_count(run: *const IsolabRun) -> usize {
    run.as_ref().map_or(0, |r| r.result.rows.len())
}

fn row(run: &IsolabRun, index: usize) -> Result<&isolab::cli::export::Judged, Failure> {
    run.result.rows.get(index).ok_or_else(|| {
        Failure(
            IsolabStatus::OutOfRange,
            format!("report {index} of {}", run.result.rows.len()),
        )
    })
}

/// Copies report `index` into `out`.
///
/// # Safety
/// `run` must come from this library and `out` be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn isolab_run_report(
    run: *const IsolabRun,
    index: usize,
    out: *mut IsolabReport,
) -> IsolabStatus {
    guard(|| {
        let run = ref_arg(run, "run")?;
        let out = out_arg(out, "out")?;
        let judged = row(run, index)?;
        let r = &judged.report;
        *out = IsolabReport {
            kind: match r.class {
                ResidualClass::Fd => IsolabClass::Fd,
                ResidualClass::Ode => IsolabClass::Ode,
                ResidualClass::Algebraic => IsolabClass::Algebraic,
            },
            max: r.max,
            mean: r.mean,
            spacing: r.spacing,
            order_estimate: r.order_estimate.unwrap_or(f64::NAN),
            tolerance: judged.tolerance,
            pass: judged.pass(),
        };
        Ok(())
    })
}

/// Name of report `index`, owned by `run`; null if out of range.
///
/// # Safety
/// `run` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn isolab_run_report_name(
    run: *const IsolabRun,
    index: usize,
) -> *const c_char {
    run.as_ref()
        .and_then(|r| r.names.get(index))
        .map_or(ptr::null(), |c| c.as_ptr())
}

/// Copies the named surface as `3 * nu * nv` doubles in row-major node
/// order. With `buffer` null only the required length is stored in `len`.
///
/// # Safety
/// `run` must come from this library, `name` be nul-terminated, `len`
/// valid, and `buffer` hold `*len` doubles when non-null.
#[no_mangle]
pub unsafe extern "C" fn isolab_run_surface(
    run: *const IsolabRun,
    name: *const c_char,
    buffer: *mut f64,
    len: *mut usize,
) -> IsolabStatus {
    guard(|| {
        let run = ref_arg(run, "run")?;
        let name = str_arg(name, "name")?;
        let len = out_arg(len, "len")?;
        let field = run.result.outcome.surface(name).ok_or_else(|| {
            Failure(
                IsolabStatus::InvalidParameter,
                format!("no surface named '{name}'"),
            )
        })?;
        let need = 3 * field.values.len();
        if buffer.is_null() {
            *len = need;
            return Ok(());
        }
        if *len < need {
            return Err(Failure(
                IsolabStatus::OutOfRange,
                format!("buffer holds {} doubles, need {need}", *len),
            ));
        }
        let out = std::slice::from_raw_parts_mut(buffer, need);
        for (chunk, p) in out.chunks_exact_mut(3).zip(&field.values) {
            chunk.copy_from_slice(&p.to_array());
        }
        *len = need;
        Ok(())
    })
}

/// # Safety
/// `run` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn isolab_run_free(run: *mut IsolabRun) {
    if !run.is_null() {
        drop(Box::from_raw(run));
    }
}
