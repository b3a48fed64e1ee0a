use std::ffi::{CStr, CString};
use std::ptr;

use uwoi_ffi::*;

fn take(s: *mut std::ffi::c_char) -> String {
    assert!(!s.is_null());
    let out = unsafe { CStr::from_ptr(s) }.to_str().unwrap().to_string();
    unsafe { uwoi_string_free(s) };
    out
}

fn orbit(p: &str) -> *mut UwoiOrbit {
    let c = CString::new(p).unwrap();
    let mut h = ptr::null_mut();
    assert_eq!(unsafe { uwoi_orbit_new(c.as_ptr(), &mut h) }, UwoiStatus::Ok);
    h
}

#[test]
fn handle_lifecycle() {
    let h = orbit("3,2,1");
    let (mut n, mut simple, mut count) = (0usize, false, 0u64);
    unsafe {
        assert_eq!(uwoi_orbit_rank(h, &mut n), UwoiStatus::Ok);
        assert_eq!(uwoi_orbit_is_simple(h, &mut simple), UwoiStatus::Ok);
        assert_eq!(uwoi_orbit_richardson_count(h, &mut count), UwoiStatus::Ok);
        uwoi_orbit_free(h);
        uwoi_orbit_free(ptr::null_mut());
    }
    assert_eq!((n, simple), (6, true));
    // 3!/(1!·1!) for gaps (1,1) between the parts 3,2,1.
    assert_eq!(count, 6);
}

#[test]
fn errors_map_to_codes() {
    let bad = CString::new("2,a").unwrap();
    let mut h = ptr::null_mut();
    assert_eq!(unsafe { uwoi_orbit_new(bad.as_ptr(), &mut h) }, UwoiStatus::InvalidInput);
    assert!(h.is_null());
    assert!(!take(uwoi_last_error()).is_empty());
    assert_eq!(unsafe { uwoi_orbit_new(ptr::null(), &mut h) }, UwoiStatus::NullPointer);

    let h = orbit("2");
    let global = CString::new("global").unwrap();
    let mut c = 0.0;
    assert_eq!(unsafe { uwoi_orbit_c_constant(h, global.as_ptr(), &mut c) }, UwoiStatus::Divergence);
    let p3 = CString::new("p3").unwrap();
    assert_eq!(unsafe { uwoi_orbit_c_constant(h, p3.as_ptr(), &mut c) }, UwoiStatus::Ok);
    assert!(c.is_finite() && c > 0.0);
    unsafe { uwoi_orbit_free(h) };
}

#[test]
fn solve_identity_and_conjugate() {
    let h = orbit("2");
    let y = CString::new("0,1;0,0").unwrap();
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { uwoi_orbit_solve_in_n(h, y.as_ptr(), &mut out) }, UwoiStatus::Ok);
    assert_eq!(take(out), "1,0;0,1");
    let outside = CString::new("0,0;1,0").unwrap();
    assert_ne!(unsafe { uwoi_orbit_solve_in_n(h, outside.as_ptr(), &mut out) }, UwoiStatus::Ok);
    assert!(!take(uwoi_last_error()).is_empty());
    unsafe { uwoi_orbit_free(h) };
}

#[test]
fn run_returns_the_cli_report() {
    let args: Vec<CString> = ["orbits", "--n", "3"].iter().map(|a| CString::new(*a).unwrap()).collect();
    let ptrs: Vec<_> = args.iter().map(|a| a.as_ptr()).collect();
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { uwoi_run(ptrs.as_ptr(), ptrs.len(), &mut out) }, UwoiStatus::Ok);
    let text = take(out);
    assert!(text.contains("\"schema\""));
    assert!(text.contains("\"ok\": true"));
}

#[test]
fn header_declares_the_api() {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/include/uwoi.h");
    let h = std::fs::read_to_string(path).unwrap();
    for f in ["uwoi_orbit_new", "uwoi_orbit_free", "uwoi_run", "uwoi_string_free", "uwoi_last_error", "UWOI_STATUS_DIVERGENCE"] {
        assert!(h.contains(f), "{f} missing from header");
    }
    // Compile the header as C when a compiler is around.
    if let Ok(status) = std::process::Command::new("cc").args(["-fsyntax-only", "-x", "c", path]).status() {
        assert!(status.success());
    }
}
