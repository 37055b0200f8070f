//! C ABI over the online covering LP and SDP solvers.
//!
//! Every function returns a [`PdlaStatus`]; on failure the message is
//! available from [`pdla_last_error_message`] on the same thread. Handles are
//! opaque and must be released with the matching `_free` function. A handle
//! whose call returned `PDLA_STATUS_PANIC` should be freed and not reused.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use pdla::instance::{validate_sdp_advice, AdviceVector};
use pdla::lp::solve_instance;
use pdla::{
    parse_advice, parse_lp_instance, validate_advice, CoveringSdpInstance, Error, ErrorKind, LpSolver, SdpSolver,
    SolverParams, SparseRow, SymMatrix,
};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PdlaStatus {
    Ok = 0,
    /// Null pointer, invalid UTF-8 or a buffer of the wrong length.
    InvalidArgument = 1,
    /// The constraints cannot be satisfied.
    Infeasible = 2,
    /// Overflow, non-convergence or another numerical failure.
    Numeric = 3,
    /// Malformed instance, advice or matrix.
    BadInput = 4,
    /// A Rust panic was caught at the boundary.
    Panic = 5,
}

/// Per-round summary filled by the `process` calls.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct PdlaStepReport {
    pub round: usize,
    /// Phase restarts triggered during this round.
    pub phases_entered: usize,
    pub iterations: usize,
    /// Row value `a·x` for LPs, `λ_min(Σ A_j x_j − B)` for SDPs.
    pub final_value: f64,
    pub cost: f64,
}

/// Opaque online covering LP solver.
pub struct PdlaLpSolver(LpSolver);

/// Opaque online covering SDP solver.
pub struct PdlaSdpSolver {
    inner: SdpSolver,
    d: usize,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

struct Fail(PdlaStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        let status = match e.kind() {
            ErrorKind::Infeasible => PdlaStatus::Infeasible,
            ErrorKind::Numeric => PdlaStatus::Numeric,
            ErrorKind::BadInput | ErrorKind::Io => PdlaStatus::BadInput,
        };
        Fail(status, e.to_string())
    }
}

fn invalid(msg: impl Into<String>) -> Fail {
    Fail(PdlaStatus::InvalidArgument, msg.into())
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> PdlaStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => PdlaStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("panic: {msg}"));
            PdlaStatus::Panic
        }
    }
}

unsafe fn slice<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], Fail> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(invalid(format!("{what} is null")));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn string<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(invalid(format!("{what} is null")));
    }
    CStr::from_ptr(p).to_str().map_err(|_| invalid(format!("{what} is not valid UTF-8")))
}

unsafe fn handle<'a, T>(p: *mut T) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or_else(|| invalid("solver handle is null"))
}

unsafe fn write_out<T>(p: *mut T, value: T, what: &str) -> Result<(), Fail> {
    if p.is_null() {
        return Err(invalid(format!("{what} is null")));
    }
    p.write(value);
    Ok(())
}

/// Advice from a nullable pointer; null means zero advice.
unsafe fn advice(x: *const f64, n: usize, lambda: f64) -> Result<AdviceVector, Fail> {
    let x_prime = if x.is_null() { vec![0.0; n] } else { slice(x, n, "advice")?.to_vec() };
    Ok(AdviceVector { x_prime, lambda })
}

unsafe fn copy_solution(x: Vec<f64>, out: *mut f64, len: usize) -> Result<(), Fail> {
    if len != x.len() {
        return Err(invalid(format!("output buffer has length {len}, solution has {}", x.len())));
    }
    if len > 0 {
        if out.is_null() {
            return Err(invalid("output buffer is null"));
        }
        ptr::copy_nonoverlapping(x.as_ptr(), out, len);
    }
    Ok(())
}

/// Message of the last failed call on this thread, or null if none. The
/// pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn pdla_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn pdla_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Creates an LP solver for `n` variables with costs `c`. `advice_x` may be
/// null for zero advice; otherwise it must hold `n` entries.
///
/// # Safety
/// `c` must point to `n` doubles, `advice_x` to `n` doubles or be null, and
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pdla_lp_new(
    c: *const f64,
    n: usize,
    boxed: bool,
    advice_x: *const f64,
    lambda: f64,
    out: *mut *mut PdlaLpSolver,
) -> PdlaStatus {
    guard(|| {
        if out.is_null() {
            return Err(invalid("out is null"));
        }
        let c = slice(c, n, "c")?.to_vec();
        let adv = advice(advice_x, n, lambda)?;
        let solver = LpSolver::online(c, boxed, &adv, SolverParams::default())?;
        out.write(Box::into_raw(Box::new(PdlaLpSolver(solver))));
        Ok(())
    })
}

/// Reveals one covering row given as `len` (column, value) pairs.
/// `report` may be null.
///
/// # Safety
/// `solver` must come from [`pdla_lp_new`]; `cols` and `vals` must point to
/// `len` elements; `report` must be writable or null.
#[no_mangle]
pub unsafe extern "C" fn pdla_lp_process_row(
    solver: *mut PdlaLpSolver,
    cols: *const usize,
    vals: *const f64,
    len: usize,
    report: *mut PdlaStepReport,
) -> PdlaStatus {
    guard(|| {
        let s = handle(solver)?;
        let cols = slice(cols, len, "cols")?;
        let vals = slice(vals, len, "vals")?;
        let row = SparseRow::new(cols.iter().copied().zip(vals.iter().copied()).collect());
        row.validate(s.0.n(), s.0.rounds())?;
        let r = s.0.process_row(&row)?;
        if !report.is_null() {
            report.write(PdlaStepReport {
                round: r.round,
                phases_entered: r.phases_entered,
                iterations: r.iterations,
                final_value: r.final_row_value,
                cost: r.cost,
            });
        }
        Ok(())
    })
}

/// Number of variables.
///
/// # Safety
/// `solver` must be a live handle or null (returns 0).
#[no_mangle]
pub unsafe extern "C" fn pdla_lp_num_vars(solver: *const PdlaLpSolver) -> usize {
    solver.as_ref().map_or(0, |s| s.0.n())
}

/// Copies the current solution into `out`, which must hold exactly `len`
/// equal to the number of variables.
///
/// # Safety
/// `out` must point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn pdla_lp_solution(solver: *const PdlaLpSolver, out: *mut f64, len: usize) -> PdlaStatus {
    guard(|| {
        let s = solver.as_ref().ok_or_else(|| invalid("solver handle is null"))?;
        copy_solution(s.0.current_solution(), out, len)
    })
}

/// Writes `c·x` of the current solution to `out`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pdla_lp_cost(solver: *const PdlaLpSolver, out: *mut f64) -> PdlaStatus {
    guard(|| {
        let s = solver.as_ref().ok_or_else(|| invalid("solver handle is null"))?;
        write_out(out, s.0.cost(), "out")
    })
}

/// Phase restarts so far.
///
/// # Safety
/// `solver` must be a live handle or null (returns 0).
#[no_mangle]
pub unsafe extern "C" fn pdla_lp_phases(solver: *const PdlaLpSolver) -> usize {
    solver.as_ref().map_or(0, |s| s.0.phases())
}

/// Releases an LP solver. Null is ignored.
///
/// # Safety
/// `solver` must come from [`pdla_lp_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn pdla_lp_free(solver: *mut PdlaLpSolver) {
    if !solver.is_null() {
        drop(Box::from_raw(solver));
    }
}

/// Solves a JSON LP instance, revealing rows in order. `advice_json` may be
/// null for zero advice with `lambda = 1`. On success `*out_json` receives a
/// result document to release with [`pdla_string_free`].
///
/// # Safety
/// Both strings must be NUL-terminated; `out_json` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pdla_lp_solve_json(
    instance_json: *const c_char,
    advice_json: *const c_char,
    out_json: *mut *mut c_char,
) -> PdlaStatus {
    guard(|| {
        if out_json.is_null() {
            return Err(invalid("out_json is null"));
        }
        let inst = parse_lp_instance(string(instance_json, "instance_json")?)?;
        let adv = if advice_json.is_null() {
            AdviceVector::zeros(inst.n, 1.0)
        } else {
            parse_advice(string(advice_json, "advice_json")?)?
        };
        let x = if adv.x_prime.is_empty() { vec![0.0; inst.n] } else { adv.x_prime };
        let adv = validate_advice(x, adv.lambda, &inst)?;
        let (solver, _) = solve_instance(&inst, &adv, SolverParams::default())?;
        let doc = format!(
            "{{\"x\":{},\"cost\":{},\"phases\":{}}}",
            json_array(&solver.current_solution()),
            json_number(solver.cost()),
            solver.phases()
        );
        out_json.write(CString::new(doc).expect("no interior nul").into_raw());
        Ok(())
    })
}

fn json_number(v: f64) -> String {
    // Display for f64 is the shortest round-tripping form and is valid JSON
    // for finite values
    if v.is_finite() {
        format!("{v}")
    } else {
        "null".into()
    }
}

fn json_array(xs: &[f64]) -> String {
    format!("[{}]", xs.iter().map(|&v| json_number(v)).collect::<Vec<_>>().join(","))
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn pdla_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Creates an SDP solver with `n` constraint matrices of size `d × d`, stored
/// row-major and back to back in `a` (`n·d·d` doubles). `advice_x` may be null.
///
/// # Safety
/// `c` must point to `n` doubles, `a` to `n·d·d` doubles, `advice_x` to `n`
/// doubles or be null, and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pdla_sdp_new(
    c: *const f64,
    n: usize,
    a: *const f64,
    d: usize,
    boxed: bool,
    advice_x: *const f64,
    lambda: f64,
    out: *mut *mut PdlaSdpSolver,
) -> PdlaStatus {
    guard(|| {
        if out.is_null() {
            return Err(invalid("out is null"));
        }
        if d == 0 {
            return Err(invalid("d must be positive"));
        }
        let c = slice(c, n, "c")?.to_vec();
        let total = n.checked_mul(d * d).ok_or_else(|| invalid("n·d·d overflows"))?;
        let data = slice(a, total, "a")?;
        let mats = data.chunks(d * d).map(|m| SymMatrix::new(d, m.to_vec())).collect::<pdla::Result<Vec<_>>>()?;
        let inst = CoveringSdpInstance::new(c, mats, vec![], boxed)?;
        let adv = advice(advice_x, n, lambda)?;
        let adv = validate_sdp_advice(adv.x_prime, adv.lambda, &inst)?;
        let solver = SdpSolver::new(&inst, &adv, SolverParams::default())?;
        out.write(Box::into_raw(Box::new(PdlaSdpSolver { inner: solver, d })));
        Ok(())
    })
}

/// Reveals the next lower-bound matrix (`d·d` doubles, row-major). It must
/// be PSD and dominate the previous one. `report` may be null.
///
/// # Safety
/// `solver` must come from [`pdla_sdp_new`]; `b` must point to `d·d`
/// doubles; `report` must be writable or null.
#[no_mangle]
pub unsafe extern "C" fn pdla_sdp_process_matrix(
    solver: *mut PdlaSdpSolver,
    b: *const f64,
    report: *mut PdlaStepReport,
) -> PdlaStatus {
    guard(|| {
        let s = handle(solver)?;
        let b = SymMatrix::new(s.d, slice(b, s.d * s.d, "b")?.to_vec())?;
        let r = s.inner.process_matrix(&b)?;
        if !report.is_null() {
            report.write(PdlaStepReport {
                round: r.round,
                phases_entered: r.phases_entered,
                iterations: r.iterations,
                final_value: r.final_gap,
                cost: r.cost,
            });
        }
        Ok(())
    })
}

/// Copies the current SDP solution into `out` (`len` must equal `n`).
///
/// # Safety
/// `out` must point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn pdla_sdp_solution(solver: *const PdlaSdpSolver, out: *mut f64, len: usize) -> PdlaStatus {
    guard(|| {
        let s = solver.as_ref().ok_or_else(|| invalid("solver handle is null"))?;
        copy_solution(s.inner.current_solution(), out, len)
    })
}

/// Writes `c·x` of the current SDP solution to `out`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pdla_sdp_cost(solver: *const PdlaSdpSolver, out: *mut f64) -> PdlaStatus {
    guard(|| {
        let s = solver.as_ref().ok_or_else(|| invalid("solver handle is null"))?;
        write_out(out, s.inner.cost(), "out")
    })
}

/// Phase restarts so far.
///
/// # Safety
/// `solver` must be a live handle or null (returns 0).
#[no_mangle]
pub unsafe extern "C" fn pdla_sdp_phases(solver: *const PdlaSdpSolver) -> usize {
    solver.as_ref().map_or(0, |s| s.inner.phases())
}

/// Releases an SDP solver. Null is ignored.
///
/// # Safety
/// `solver` must come from [`pdla_sdp_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn pdla_sdp_free(solver: *mut PdlaSdpSolver) {
    if !solver.is_null() {
        drop(Box::from_raw(solver));
    }
}
