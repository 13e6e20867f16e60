//! Exercise the C entry points from Rust: handle lifecycles, status codes
//! and the thread-local error message.

use std::f64::consts::SQRT_2;
use std::ffi::CStr;
use std::ptr;

use csc_bundles_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(csc_last_error_message()) }
        .to_string_lossy()
        .into_owned()
}

#[test]
fn version_is_a_static_string() {
    let version = unsafe { CStr::from_ptr(csc_version()) }.to_str().unwrap();
    assert!(!version.is_empty());
}

#[test]
fn quarter_period_and_jacobi() {
    let mut quarter = 0.0;
    assert_eq!(csc_quarter_period(0.0, &mut quarter), CscStatus::Ok);
    assert!((quarter - std::f64::consts::FRAC_PI_2).abs() < 1e-14);

    let (mut sn, mut cn, mut dn) = (0.0, 0.0, 0.0);
    assert_eq!(
        csc_jacobi(0.7, 0.6, &mut sn, &mut cn, &mut dn),
        CscStatus::Ok
    );
    assert!((sn * sn + cn * cn - 1.0).abs() < 1e-14);
    assert!((dn * dn - (1.0 - 0.36 * sn * sn)).abs() < 1e-14);
    // Null slots are allowed for unwanted components.
    assert_eq!(
        csc_jacobi(0.7, 0.6, ptr::null_mut(), ptr::null_mut(), ptr::null_mut()),
        CscStatus::Ok
    );

    assert_eq!(
        csc_quarter_period(1.5, &mut quarter),
        CscStatus::InvalidArgument
    );
    assert!(!last_error().is_empty());
}

#[test]
fn elliptic_solution_roundtrip() {
    let a = 10f64.sqrt();
    let mut handle: *mut CscJoinSolution = ptr::null_mut();
    let status = csc_join_solution_elliptic(0.0, 1, 1, a, a, 0.5, &mut handle);
    assert_eq!(status, CscStatus::Ok);
    assert!(!handle.is_null());

    let (mut gamma, mut span, mut scal) = (0.0, 0.0, 0.0);
    assert_eq!(
        csc_join_solution_info(handle, &mut gamma, &mut span, &mut scal),
        CscStatus::Ok
    );
    assert!(
        (gamma * gamma - SQRT_2).abs() < 1e-10,
        "gamma^2 = {}",
        gamma * gamma
    );
    assert!((scal - (-3.0 * SQRT_2)).abs() < 1e-10, "R = {scal}");
    assert!(span > 0.0);

    let mut residual = f64::NAN;
    assert_eq!(
        csc_join_solution_verify(handle, 200, &mut residual),
        CscStatus::Ok
    );
    assert!(residual < 1e-8, "residual = {residual:e}");

    csc_join_solution_free(handle);
}

#[test]
fn flat_solution_recovers_the_round_sphere() {
    let mut handle: *mut CscJoinSolution = ptr::null_mut();
    assert_eq!(
        csc_join_solution_flat(0.0, 1, 1, 0.0, 0.0, 1.0, &mut handle),
        CscStatus::Ok
    );
    let mut scal = 0.0;
    assert_eq!(
        csc_join_solution_info(handle, ptr::null_mut(), ptr::null_mut(), &mut scal),
        CscStatus::Ok
    );
    assert!((scal - 6.0).abs() < 1e-12);
    csc_join_solution_free(handle);

    // Mismatched connection norms have no trigonometric profile.
    assert_eq!(
        csc_join_solution_flat(0.0, 1, 1, 0.0, 1.0, 1.0, &mut handle),
        CscStatus::InvalidArgument
    );
}

#[test]
fn inadmissible_modulus_is_reported() {
    let mut handle: *mut CscJoinSolution = ptr::null_mut();
    let status = csc_join_solution_elliptic(0.0, 1, 2, 1.0, 2.0, 0.5, &mut handle);
    assert_eq!(status, CscStatus::InadmissibleModulus);
    assert!(handle.is_null());
    assert!(
        last_error().contains("inadmissible modulus"),
        "message: {}",
        last_error()
    );
}

#[test]
fn null_pointers_are_rejected() {
    assert_eq!(
        csc_quarter_period(0.5, ptr::null_mut()),
        CscStatus::NullPointer
    );
    assert_eq!(
        csc_join_solution_elliptic(0.0, 1, 1, 1.0, 1.0, 0.5, ptr::null_mut()),
        CscStatus::NullPointer
    );
    assert_eq!(
        csc_join_solution_info(
            ptr::null(),
            ptr::null_mut(),
            ptr::null_mut(),
            ptr::null_mut()
        ),
        CscStatus::NullPointer
    );
    let mut count = 0u32;
    assert_eq!(
        csc_count_report_count(ptr::null(), &mut count),
        CscStatus::NullPointer
    );
}

#[test]
fn family_count_matches_the_parameter_trichotomy() {
    let mut count = 0u32;
    assert_eq!(csc_family_count(1, 2, 2.0, 1.0, &mut count), CscStatus::Ok);
    assert_eq!(count, 2);
    assert_eq!(csc_family_count(1, 2, 0.0, 0.0, &mut count), CscStatus::Ok);
    assert_eq!(count, 1);
}

#[test]
fn radial_count_over_the_circle() {
    let mut handle: *mut CscCountReport = ptr::null_mut();
    assert_eq!(
        csc_count_radial(3, 2.5, 1, 1.0, 0, &mut handle),
        CscStatus::Ok
    );

    let (mut count, mut collapsed, mut bound) = (0u32, 0u32, 0u32);
    assert_eq!(csc_count_report_count(handle, &mut count), CscStatus::Ok);
    assert_eq!(
        csc_count_report_collapsed(handle, &mut collapsed),
        CscStatus::Ok
    );
    assert_eq!(
        csc_count_report_lower_bound(handle, &mut bound),
        CscStatus::Ok
    );
    assert_eq!(count, 3);
    assert_eq!(collapsed, 2);
    assert_eq!(bound, 2);

    let mut alpha = 0.0;
    assert_eq!(csc_count_report_alpha(handle, 0, &mut alpha), CscStatus::Ok);
    assert!((alpha - 0.690512).abs() < 1e-4, "alpha[0] = {alpha}");
    assert_eq!(csc_count_report_alpha(handle, 1, &mut alpha), CscStatus::Ok);
    assert!((alpha - 1.0).abs() < 1e-9, "alpha[1] = {alpha}");
    assert_eq!(
        csc_count_report_alpha(handle, count, &mut alpha),
        CscStatus::InvalidArgument
    );

    csc_count_report_free(handle);

    // The maximum-principle regime is an input error, not a numeric one.
    assert_eq!(
        csc_count_radial(3, -1.0, 1, 1.0, 0, &mut handle),
        CscStatus::InvalidArgument
    );
}
