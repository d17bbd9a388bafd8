//! C ABI for the exact-arithmetic laboratory: opaque expression handles,
//! status codes, and string-based exact values so any language with a C FFI
//! can parse, evaluate, build indicators, and run orbit computations.
//!
//! Conventions:
//! - every returned string is owned by the caller and must be released with
//!   `gplab_string_free`;
//! - expression handles must be released with `gplab_expr_free`;
//! - functions returning a pointer yield null on failure, functions
//!   returning `GplabStatus` report the failure class; in both cases
//!   `gplab_last_error` carries a message until the next call on the same
//!   thread.

use gplab::error::Error;
use gplab::genpoly::{indicator_ge0, indicator_interval, indicator_zero, parse, GenPoly};
use gplab::orbits::{orbit_to_csv, torus_orbit};
use gplab::scalar::{parse_scalar, ExactScalar};
use gplab::semialg::parse_set_spec;
use libc::c_char;
use std::cell::RefCell;
use std::ffi::{CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

/// Status codes returned by fallible entry points.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GplabStatus {
    Ok = 0,
    /// Malformed input text (syntax error, unknown variable, bad shape).
    InvalidInput = 1,
    /// A floor or comparison stayed undecided at the precision cap.
    Indeterminate = 2,
    /// Domain error (division by zero, premise violation, ...).
    Domain = 3,
    /// A required pointer argument was null or not valid UTF-8.
    NullArgument = 4,
    /// Internal panic caught at the boundary.
    Panic = 5,
}

/// Opaque generalised-polynomial expression handle.
pub struct GplabExpr {
    inner: GenPoly,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg).unwrap_or_else(|_| CString::new("invalid error text").unwrap());
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn status_of(err: &Error) -> GplabStatus {
    match err {
        Error::SyntaxError { .. } | Error::UnknownVariable(_) | Error::InvalidInput(_) => {
            GplabStatus::InvalidInput
        }
        Error::IndeterminateFloor { .. } | Error::IndeterminateComparison { .. } => {
            GplabStatus::Indeterminate
        }
        _ => GplabStatus::Domain,
    }
}

/// Message for the most recent failure on this thread, or null.
/// The pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn gplab_last_error() -> *const c_char {
    LAST_ERROR.with(|e| {
        e.borrow()
            .as_ref()
            .map(|c| c.as_ptr())
            .unwrap_or(std::ptr::null())
    })
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn gplab_version() -> *const c_char {
    concat!("gplab ", env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

unsafe fn text_arg<'a>(ptr: *const c_char) -> Result<&'a str, GplabStatus> {
    if ptr.is_null() {
        set_error("null argument".into());
        return Err(GplabStatus::NullArgument);
    }
    CStr::from_ptr(ptr).to_str().map_err(|_| {
        set_error("argument is not valid UTF-8".into());
        GplabStatus::NullArgument
    })
}

fn out_string(s: String) -> *mut c_char {
    CString::new(s)
        .unwrap_or_else(|_| CString::new("").unwrap())
        .into_raw()
}

fn catch_expr(f: impl FnOnce() -> Result<GenPoly, Error>) -> *mut GplabExpr {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(g)) => Box::into_raw(Box::new(GplabExpr { inner: g })),
        Ok(Err(e)) => {
            set_error(e.to_string());
            std::ptr::null_mut()
        }
        Err(_) => {
            set_error("internal panic".into());
            std::ptr::null_mut()
        }
    }
}

fn catch_status(f: impl FnOnce() -> Result<(), Error>) -> GplabStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => GplabStatus::Ok,
        Ok(Err(e)) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Err(_) => {
            set_error("internal panic".into());
            GplabStatus::Panic
        }
    }
}

fn parse_point(text: &str) -> Result<Vec<ExactScalar>, Error> {
    text.split(',').map(|s| parse_scalar(s.trim())).collect()
}

/// Parse an expression in the DSL (`frac`, `floor`, `sqrt`, `n`, `x_i`, ...).
/// Returns null on error.
///
/// # Safety
/// `text` must be a valid NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn gplab_expr_parse(text: *const c_char) -> *mut GplabExpr {
    let Ok(t) = text_arg(text) else {
        return std::ptr::null_mut();
    };
    catch_expr(|| parse(t))
}

/// Release an expression handle. Null is ignored.
///
/// # Safety
/// `expr` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn gplab_expr_free(expr: *mut GplabExpr) {
    if !expr.is_null() {
        drop(Box::from_raw(expr));
    }
}

/// Release a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn gplab_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Render an expression back to DSL text (reparses to an equal expression).
///
/// # Safety
/// `expr` must be a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn gplab_expr_unparse(expr: *const GplabExpr) -> *mut c_char {
    clear_error();
    if expr.is_null() {
        set_error("null expression".into());
        return std::ptr::null_mut();
    }
    out_string((*expr).inner.unparse())
}

/// Number of variables the expression uses.
///
/// # Safety
/// `expr` must be a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn gplab_expr_arity(expr: *const GplabExpr) -> usize {
    if expr.is_null() {
        return 0;
    }
    (*expr).inner.arity()
}

/// Evaluate at an exact point given as comma-separated scalar literals
/// (e.g. "7" or "1/2,sqrt(2)"). On success `*out` holds the exact value as
/// text.
///
/// # Safety
/// All pointers must be valid; `out` must point to a writable pointer slot.
#[no_mangle]
pub unsafe extern "C" fn gplab_expr_eval(
    expr: *const GplabExpr,
    point: *const c_char,
    max_bits: u32,
    out: *mut *mut c_char,
) -> GplabStatus {
    if expr.is_null() || out.is_null() {
        set_error("null argument".into());
        return GplabStatus::NullArgument;
    }
    let p = match text_arg(point) {
        Ok(p) => p,
        Err(s) => return s,
    };
    catch_status(|| {
        let pt = parse_point(p)?;
        let v = (*expr).inner.eval(&pt, max_bits)?;
        *out = out_string(v.to_string());
        Ok(())
    })
}

/// Indicator of g(n) >= 0 on the positive integers, as a new expression.
///
/// # Safety
/// `expr` must be a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn gplab_expr_indicator_ge0(expr: *const GplabExpr) -> *mut GplabExpr {
    if expr.is_null() {
        set_error("null expression".into());
        return std::ptr::null_mut();
    }
    catch_expr(|| indicator_ge0(&(*expr).inner))
}

/// Indicator of g(n) = 0 on the positive integers, as a new expression.
///
/// # Safety
/// `expr` must be a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn gplab_expr_indicator_zero(expr: *const GplabExpr) -> *mut GplabExpr {
    if expr.is_null() {
        set_error("null expression".into());
        return std::ptr::null_mut();
    }
    catch_expr(|| indicator_zero(&(*expr).inner))
}

/// Indicator of a <= g(n) < b, with a and b exact scalar literals.
///
/// # Safety
/// `expr` must be a live handle; `a`, `b` valid NUL-terminated strings.
#[no_mangle]
pub unsafe extern "C" fn gplab_expr_indicator_interval(
    expr: *const GplabExpr,
    a: *const c_char,
    b: *const c_char,
) -> *mut GplabExpr {
    if expr.is_null() {
        set_error("null expression".into());
        return std::ptr::null_mut();
    }
    let (Ok(a), Ok(b)) = (text_arg(a), text_arg(b)) else {
        return std::ptr::null_mut();
    };
    catch_expr(|| {
        let a = parse_scalar(a)?;
        let b = parse_scalar(b)?;
        indicator_interval(&(*expr).inner, &a, &b)
    })
}

/// Torus orbit ({k^n x})_{n=0..n_steps} as CSV text with exact entries.
/// `x` is a comma-separated list of exact coordinates.
///
/// # Safety
/// All pointers must be valid; `out` must point to a writable pointer slot.
#[no_mangle]
pub unsafe extern "C" fn gplab_torus_orbit_csv(
    x: *const c_char,
    k: u64,
    n_steps: usize,
    max_bits: u32,
    out: *mut *mut c_char,
) -> GplabStatus {
    if out.is_null() {
        set_error("null output slot".into());
        return GplabStatus::NullArgument;
    }
    let xs = match text_arg(x) {
        Ok(p) => p,
        Err(s) => return s,
    };
    catch_status(|| {
        let pt = parse_point(xs)?;
        let orbit = torus_orbit(&pt, k, n_steps, max_bits)?;
        let names: Vec<String> = (1..=pt.len()).map(|i| format!("x_{i}")).collect();
        *out = out_string(orbit_to_csv(&orbit, &names));
        Ok(())
    })
}

/// Exact membership of a point in a semialgebraic set given as a spec string
/// (pieces `|`, conjuncts `;`, comparisons `<`, `>`, `==`, chains allowed).
/// Writes 1 or 0 into `*out_member`.
///
/// # Safety
/// All pointers must be valid; `out_member` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gplab_set_member(
    set_spec: *const c_char,
    point: *const c_char,
    max_bits: u32,
    out_member: *mut i32,
) -> GplabStatus {
    if out_member.is_null() {
        set_error("null output slot".into());
        return GplabStatus::NullArgument;
    }
    let (spec, pt) = match (text_arg(set_spec), text_arg(point)) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(s), _) | (_, Err(s)) => return s,
    };
    catch_status(|| {
        let coords = parse_point(pt)?;
        let s = parse_set_spec(spec, Some(coords.len()))?;
        let m = s.contains(&coords, max_bits)?;
        *out_member = i32::from(m);
        Ok(())
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(s: &str) -> CString {
        CString::new(s).unwrap()
    }

    #[test]
    fn parse_eval_roundtrip_through_the_abi() {
        unsafe {
            let e = gplab_expr_parse(c("frac(n/3)").as_ptr());
            assert!(!e.is_null());
            let mut out: *mut c_char = std::ptr::null_mut();
            let st = gplab_expr_eval(e, c("7").as_ptr(), 4096, &mut out);
            assert_eq!(st, GplabStatus::Ok);
            assert_eq!(CStr::from_ptr(out).to_str().unwrap(), "1/3");
            gplab_string_free(out);
            let text = gplab_expr_unparse(e);
            let back = gplab_expr_parse(text);
            assert!(!back.is_null());
            gplab_string_free(text);
            gplab_expr_free(back);
            gplab_expr_free(e);
        }
    }

    #[test]
    fn syntax_errors_set_last_error() {
        unsafe {
            let e = gplab_expr_parse(c("frac(").as_ptr());
            assert!(e.is_null());
            let msg = gplab_last_error();
            assert!(!msg.is_null());
            let text = CStr::from_ptr(msg).to_str().unwrap();
            assert!(text.contains("syntax error"), "got: {text}");
        }
    }

    #[test]
    fn indicator_through_the_abi() {
        unsafe {
            let e = gplab_expr_parse(c("n - 5").as_ptr());
            let ind = gplab_expr_indicator_ge0(e);
            assert!(!ind.is_null());
            for (n, expect) in [(1, "0"), (4, "0"), (5, "1"), (9, "1")] {
                let mut out: *mut c_char = std::ptr::null_mut();
                let st =
                    gplab_expr_eval(ind, c(&n.to_string()).as_ptr(), 4096, &mut out);
                assert_eq!(st, GplabStatus::Ok);
                assert_eq!(CStr::from_ptr(out).to_str().unwrap(), expect);
                gplab_string_free(out);
            }
            gplab_expr_free(ind);
            gplab_expr_free(e);
        }
    }

    #[test]
    fn orbit_and_membership_through_the_abi() {
        unsafe {
            let mut out: *mut c_char = std::ptr::null_mut();
            let st = gplab_torus_orbit_csv(c("1/7").as_ptr(), 2, 3, 4096, &mut out);
            assert_eq!(st, GplabStatus::Ok);
            let text = CStr::from_ptr(out).to_str().unwrap();
            assert!(text.starts_with("n,x_1\n0,1/7\n1,2/7\n2,4/7\n3,1/7\n"));
            gplab_string_free(out);

            let mut member = -1i32;
            let st = gplab_set_member(
                c("0.55<x_1<0.61").as_ptr(),
                c("0.58").as_ptr(),
                4096,
                &mut member,
            );
            assert_eq!(st, GplabStatus::Ok);
            assert_eq!(member, 1);
            let st = gplab_set_member(
                c("0.55<x_1<0.61").as_ptr(),
                c("11/20").as_ptr(),
                4096,
                &mut member,
            );
            assert_eq!(st, GplabStatus::Ok);
            assert_eq!(member, 0);
        }
    }

    #[test]
    fn null_arguments_are_rejected() {
        unsafe {
            assert!(gplab_expr_parse(std::ptr::null()).is_null());
            let mut out: *mut c_char = std::ptr::null_mut();
            let st = gplab_expr_eval(std::ptr::null(), c("1").as_ptr(), 64, &mut out);
            assert_eq!(st, GplabStatus::NullArgument);
        }
    }
}
