//! C ABI for the csc-bundles toolkit.
//!
//! Conventions: every function returns a [`CscStatus`]; results travel
//! through out-pointers. Null out-pointers for optional results are
//! skipped, a null required pointer yields [`CscStatus::NullPointer`].
//! On any non-Ok status the thread-local message retrieved by
//! [`csc_last_error_message`] describes the failure; the pointer stays
//! valid until the next failing call on the same thread. Handles returned
//! through `*mut` out-parameters own their data and must be released with
//! the matching `_free` function exactly once.

use std::cell::RefCell;
use std::ffi::{c_char, CString};

use csc_bundles::curvature::BaseGeometry;
use csc_bundles::elliptic::{jacobi, quarter_period, Modulus};
use csc_bundles::join::{families, verify_residual, JoinParams, WarpSolution};
use csc_bundles::yamabe::{count_radial_solutions, CountReport, ShootingConfig, YamabeProblem};
use csc_bundles::Error;

/// Status code returned by every entry point.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CscStatus {
    /// The call succeeded.
    Ok = 0,
    /// A parameter violated a precondition.
    InvalidArgument = 1,
    /// The squared modulus lies outside the admissible interval of the
    /// requested branch.
    InadmissibleModulus = 2,
    /// A numerical procedure failed to converge.
    Numeric = 3,
    /// A required pointer was null.
    NullPointer = 4,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn fail(status: CscStatus, message: impl std::fmt::Display) -> CscStatus {
    LAST_ERROR.with(|slot| {
        let text = message.to_string().replace('\0', " ");
        *slot.borrow_mut() = CString::new(text).unwrap_or_default();
    });
    status
}

fn fail_with(err: Error) -> CscStatus {
    let status = match &err {
        Error::InadmissibleModulus { .. } => CscStatus::InadmissibleModulus,
        Error::Integration { .. } => CscStatus::Numeric,
        _ => CscStatus::InvalidArgument,
    };
    fail(status, err)
}

fn null_pointer(name: &str) -> CscStatus {
    fail(
        CscStatus::NullPointer,
        format!("required pointer {name} was null"),
    )
}

unsafe fn write_opt<T>(ptr: *mut T, value: T) {
    if !ptr.is_null() {
        *ptr = value;
    }
}

/// Version of the underlying library as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn csc_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Message describing the most recent failure on this thread. Never null;
/// empty before the first failure.
#[no_mangle]
pub extern "C" fn csc_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Quarter period K(k) of the elliptic functions with modulus `k`.
#[no_mangle]
pub extern "C" fn csc_quarter_period(k: f64, out: *mut f64) -> CscStatus {
    if out.is_null() {
        return null_pointer("out");
    }
    match Modulus::new(k) {
        Ok(modulus) => {
            unsafe { *out = quarter_period(modulus) };
            CscStatus::Ok
        }
        Err(e) => fail_with(e),
    }
}

/// Jacobi elliptic sn, cn, dn at argument `t` and modulus `k`. Individual
/// out-pointers may be null to skip that component.
#[no_mangle]
pub extern "C" fn csc_jacobi(
    t: f64,
    k: f64,
    sn: *mut f64,
    cn: *mut f64,
    dn: *mut f64,
) -> CscStatus {
    match Modulus::new(k) {
        Ok(modulus) => {
            let v = jacobi(t, modulus);
            unsafe {
                write_opt(sn, v.sn);
                write_opt(cn, v.cn);
                write_opt(dn, v.dn);
            }
            CscStatus::Ok
        }
        Err(e) => fail_with(e),
    }
}

/// One solved warping profile over a base of scalar curvature `base_scal`.
pub struct CscJoinSolution {
    params: JoinParams,
    solution: WarpSolution,
}

fn join_params(base_scal: f64, k1: u32, k2: u32, a1: f64, a2: f64) -> Result<JoinParams, Error> {
    let base = BaseGeometry::new(2, base_scal)?;
    JoinParams::new(base, k1, k2, a1, a2)
}

unsafe fn emit_solution(
    params: JoinParams,
    solution: Result<WarpSolution, Error>,
    out: *mut *mut CscJoinSolution,
) -> CscStatus {
    if out.is_null() {
        return null_pointer("out");
    }
    match solution {
        Ok(solution) => {
            let handle = Box::new(CscJoinSolution { params, solution });
            *out = Box::into_raw(handle);
            CscStatus::Ok
        }
        Err(e) => fail_with(e),
    }
}

/// Solve for the warping profiles with the given squared modulus on the
/// branch selected by the fiber data (k1, k2, a1, a2).
#[no_mangle]
pub extern "C" fn csc_join_solution_elliptic(
    base_scal: f64,
    k1: u32,
    k2: u32,
    a1: f64,
    a2: f64,
    modulus_sq: f64,
    out: *mut *mut CscJoinSolution,
) -> CscStatus {
    if out.is_null() {
        return null_pointer("out");
    }
    let attempt = || -> Result<(JoinParams, WarpSolution), Error> {
        let params = join_params(base_scal, k1, k2, a1, a2)?;
        let modulus = Modulus::from_sq(modulus_sq)?;
        let solution = WarpSolution::elliptic(&params, modulus)?;
        Ok((params, solution))
    };
    match attempt() {
        Ok((params, solution)) => unsafe { emit_solution(params, Ok(solution), out) },
        Err(e) => fail_with(e),
    }
}

/// Solve for trigonometric profiles (modulus zero) with the given frequency;
/// requires a1 == a2.
#[no_mangle]
pub extern "C" fn csc_join_solution_flat(
    base_scal: f64,
    k1: u32,
    k2: u32,
    a1: f64,
    a2: f64,
    gamma: f64,
    out: *mut *mut CscJoinSolution,
) -> CscStatus {
    if out.is_null() {
        return null_pointer("out");
    }
    match join_params(base_scal, k1, k2, a1, a2) {
        Ok(params) => unsafe { emit_solution(params, WarpSolution::flat(&params, gamma), out) },
        Err(e) => fail_with(e),
    }
}

/// Read the frequency gamma, the profile half-period T and the total scalar
/// curvature R from a solution handle. Null outputs are skipped.
#[no_mangle]
pub extern "C" fn csc_join_solution_info(
    handle: *const CscJoinSolution,
    gamma: *mut f64,
    span: *mut f64,
    scal: *mut f64,
) -> CscStatus {
    if handle.is_null() {
        return null_pointer("handle");
    }
    let sol = unsafe { &(*handle).solution };
    unsafe {
        write_opt(gamma, sol.gamma);
        write_opt(span, sol.span);
        write_opt(scal, sol.scal_total);
    }
    CscStatus::Ok
}

/// Re-evaluate the scalar curvature of the stored profiles on `grid`
/// interior points and report the largest deviation from the stored R.
#[no_mangle]
pub extern "C" fn csc_join_solution_verify(
    handle: *const CscJoinSolution,
    grid: u32,
    out: *mut f64,
) -> CscStatus {
    if handle.is_null() {
        return null_pointer("handle");
    }
    if out.is_null() {
        return null_pointer("out");
    }
    let h = unsafe { &*handle };
    match verify_residual(&h.params, &h.solution, grid as usize) {
        Ok(residual) => {
            unsafe { *out = residual };
            CscStatus::Ok
        }
        Err(e) => fail_with(e),
    }
}

/// Release a solution handle.
#[no_mangle]
pub extern "C" fn csc_join_solution_free(handle: *mut CscJoinSolution) {
    if !handle.is_null() {
        drop(unsafe { Box::from_raw(handle) });
    }
}

/// Number of one-parameter solution families for the given fiber data.
#[no_mangle]
pub extern "C" fn csc_family_count(k1: u32, k2: u32, a1: f64, a2: f64, out: *mut u32) -> CscStatus {
    if out.is_null() {
        return null_pointer("out");
    }
    match join_params(0.0, k1, k2, a1, a2) {
        Ok(params) => {
            unsafe { *out = families(&params).len() as u32 };
            CscStatus::Ok
        }
        Err(e) => fail_with(e),
    }
}

/// Result of a radial solution count.
pub struct CscCountReport {
    report: CountReport,
}

/// Count positive radial solutions of the subcritical equation on the
/// d-sphere of the given radius inside dimension n at curvature `scal`.
/// `n_scan` = 0 selects the default scan resolution.
#[no_mangle]
pub extern "C" fn csc_count_radial(
    n: u32,
    scal: f64,
    d: u32,
    radius: f64,
    n_scan: u32,
    out: *mut *mut CscCountReport,
) -> CscStatus {
    if out.is_null() {
        return null_pointer("out");
    }
    let attempt = || -> Result<CountReport, Error> {
        let problem = YamabeProblem::new(n, scal, d, radius)?;
        let mut cfg = ShootingConfig::default();
        if n_scan > 0 {
            cfg.n_scan = n_scan as usize;
        }
        count_radial_solutions(&problem, &cfg)
    };
    match attempt() {
        Ok(report) => {
            unsafe { *out = Box::into_raw(Box::new(CscCountReport { report })) };
            CscStatus::Ok
        }
        Err(e) => fail_with(e),
    }
}

/// Number of distinct solutions found.
#[no_mangle]
pub extern "C" fn csc_count_report_count(
    handle: *const CscCountReport,
    out: *mut u32,
) -> CscStatus {
    if handle.is_null() {
        return null_pointer("handle");
    }
    if out.is_null() {
        return null_pointer("out");
    }
    unsafe { *out = (*handle).report.count as u32 };
    CscStatus::Ok
}

/// Number of solutions after identifying reflection pairs.
#[no_mangle]
pub extern "C" fn csc_count_report_collapsed(
    handle: *const CscCountReport,
    out: *mut u32,
) -> CscStatus {
    if handle.is_null() {
        return null_pointer("handle");
    }
    if out.is_null() {
        return null_pointer("out");
    }
    unsafe { *out = (*handle).report.reflection_collapsed_count as u32 };
    CscStatus::Ok
}

/// Lower bound on the count guaranteed by the eigenvalue criterion.
#[no_mangle]
pub extern "C" fn csc_count_report_lower_bound(
    handle: *const CscCountReport,
    out: *mut u32,
) -> CscStatus {
    if handle.is_null() {
        return null_pointer("handle");
    }
    if out.is_null() {
        return null_pointer("out");
    }
    unsafe { *out = (*handle).report.guaranteed_lower_bound };
    CscStatus::Ok
}

/// Central value of the `index`-th solution (sorted by value).
#[no_mangle]
pub extern "C" fn csc_count_report_alpha(
    handle: *const CscCountReport,
    index: u32,
    out: *mut f64,
) -> CscStatus {
    if handle.is_null() {
        return null_pointer("handle");
    }
    if out.is_null() {
        return null_pointer("out");
    }
    let report = unsafe { &(*handle).report };
    match report.solutions.get(index as usize) {
        Some(sol) => {
            unsafe { *out = sol.alpha };
            CscStatus::Ok
        }
        None => fail(
            CscStatus::InvalidArgument,
            format!(
                "index {index} out of range for {} solutions",
                report.solutions.len()
            ),
        ),
    }
}

/// Release a count report handle.
#[no_mangle]
pub extern "C" fn csc_count_report_free(handle: *mut CscCountReport) {
    if !handle.is_null() {
        drop(unsafe { Box::from_raw(handle) });
    }
}
