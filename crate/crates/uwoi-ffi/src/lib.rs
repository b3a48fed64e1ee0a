//! C ABI over `uwoi`.
//!
//! Every entry point returns a [`UwoiStatus`]. Results come back through
//! out-pointers. Strings handed to the caller are NUL-terminated UTF-8 and
//! must be released with [`uwoi_string_free`]; orbit handles are released
//! with [`uwoi_orbit_free`]. The message of the most recent failure on the
//! calling thread is available from [`uwoi_last_error`].
//!
//! Panics never cross the boundary: they are caught and reported as
//! [`UwoiStatus::Panic`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use uwoi::linalg::QMatrix;
use uwoi::localfield::{solve_in_n, Place};
use uwoi::orbits::{NilpotentOrbit, Partition};
use uwoi::richardson::{epsilon_count_formula, OrbitData};
use uwoi::zeta::{c_constant, ZetaBackend};
use uwoi::Error;

/// Outcome of a call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UwoiStatus {
    Ok = 0,
    /// The command ran but at least one of its checks failed.
    ChecksFailed = 1,
    NullPointer = 2,
    InvalidUtf8 = 3,
    InvalidInput = 4,
    SizeMismatch = 5,
    Singular = 6,
    NotInOrbit = 7,
    NotAdjacent = 8,
    SingularDirection = 9,
    Divergence = 10,
    Pole = 11,
    Boundary = 12,
    Unsupported = 13,
    Internal = 14,
    Panic = 15,
}

impl From<&Error> for UwoiStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::InvalidInput(_) => UwoiStatus::InvalidInput,
            Error::SizeMismatch(_) => UwoiStatus::SizeMismatch,
            Error::Singular => UwoiStatus::Singular,
            Error::NotInOrbit(_) => UwoiStatus::NotInOrbit,
            Error::NotAdjacent => UwoiStatus::NotAdjacent,
            Error::SingularDirection => UwoiStatus::SingularDirection,
            Error::Divergence(_) => UwoiStatus::Divergence,
            Error::Pole(_) => UwoiStatus::Pole,
            Error::Boundary(_) => UwoiStatus::Boundary,
            Error::Unsupported(_) => UwoiStatus::Unsupported,
            Error::Internal(_) => UwoiStatus::Internal,
        }
    }
}

/// A nilpotent orbit of GL(n) together with its Richardson data.
pub struct UwoiOrbit {
    data: OrbitData,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior NULs were removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

struct Failure(UwoiStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(UwoiStatus::from(&e), e.to_string())
    }
}

/// Runs `f`, records any failure message and converts it to a status.
fn guard(f: impl FnOnce() -> Result<UwoiStatus, Failure>) -> UwoiStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(s)) => s,
        Ok(Err(Failure(s, msg))) => {
            set_error(msg);
            s
        }
        Err(_) => {
            set_error("panic inside uwoi".into());
            UwoiStatus::Panic
        }
    }
}

unsafe fn read_str<'a>(p: *const c_char) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure(UwoiStatus::NullPointer, "null string argument".into()));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(UwoiStatus::InvalidUtf8, "argument is not UTF-8".into()))
}

fn null_out() -> Failure {
    Failure(UwoiStatus::NullPointer, "null output pointer".into())
}

fn into_c(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).expect("interior NULs were removed").into_raw()
}

unsafe fn orbit_ref<'a>(h: *const UwoiOrbit) -> Result<&'a UwoiOrbit, Failure> {
    h.as_ref().ok_or_else(|| Failure(UwoiStatus::NullPointer, "null orbit handle".into()))
}

/// Creates an orbit from a partition such as `"3,2,1"`.
///
/// # Safety
/// `partition` must be a valid C string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn uwoi_orbit_new(partition: *const c_char, out: *mut *mut UwoiOrbit) -> UwoiStatus {
    guard(|| {
        if out.is_null() {
            return Err(null_out());
        }
        let p = Partition::parse(read_str(partition)?)?;
        let data = OrbitData::new(&NilpotentOrbit::new(p))?;
        *out = Box::into_raw(Box::new(UwoiOrbit { data }));
        Ok(UwoiStatus::Ok)
    })
}

/// Releases a handle from [`uwoi_orbit_new`]. Null is ignored.
///
/// # Safety
/// `h` must come from [`uwoi_orbit_new`] and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn uwoi_orbit_free(h: *mut UwoiOrbit) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// Rank `n` of the ambient group.
///
/// # Safety
/// `h` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn uwoi_orbit_rank(h: *const UwoiOrbit, out: *mut usize) -> UwoiStatus {
    guard(|| {
        let o = orbit_ref(h)?;
        if out.is_null() {
            return Err(null_out());
        }
        *out = o.data.n();
        Ok(UwoiStatus::Ok)
    })
}

/// Whether every part size from 1 up to the largest part occurs.
///
/// # Safety
/// `h` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn uwoi_orbit_is_simple(h: *const UwoiOrbit, out: *mut bool) -> UwoiStatus {
    guard(|| {
        let o = orbit_ref(h)?;
        if out.is_null() {
            return Err(null_out());
        }
        *out = o.data.orbit.is_simple();
        Ok(UwoiStatus::Ok)
    })
}

/// Number of Richardson parabolics of the orbit with the standard Levi.
///
/// # Safety
/// `h` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn uwoi_orbit_richardson_count(h: *const UwoiOrbit, out: *mut u64) -> UwoiStatus {
    guard(|| {
        let o = orbit_ref(h)?;
        if out.is_null() {
            return Err(null_out());
        }
        let count = o.data.richardson.len() as u64;
        debug_assert_eq!(count as u128, epsilon_count_formula(&o.data.orbit));
        *out = count;
        Ok(UwoiStatus::Ok)
    })
}

/// The constant `c_X` at `backend`: `"global"`, `"inf"`, `"C"` or `"pQ"`.
/// The global backend reports [`UwoiStatus::Divergence`] for non-simple orbits.
///
/// # Safety
/// `h` must be a live handle, `backend` a C string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn uwoi_orbit_c_constant(h: *const UwoiOrbit, backend: *const c_char, out: *mut f64) -> UwoiStatus {
    guard(|| {
        let o = orbit_ref(h)?;
        if out.is_null() {
            return Err(null_out());
        }
        let b = match read_str(backend)? {
            "global" => ZetaBackend::Global,
            other => match Place::parse(other)? {
                Place::Padic(p) => ZetaBackend::Padic(p),
                Place::Real => ZetaBackend::Real,
                Place::Complex => ZetaBackend::Complex,
            },
        };
        *out = c_constant(&o.data.orbit, &b)?.value;
        Ok(UwoiStatus::Ok)
    })
}

/// Solves `Y = n⁻¹ X n` for `n` in the unipotent radical. `y` and the
/// result use the `"a,b;c,d"` matrix text format with exact rationals.
///
/// # Safety
/// `h` must be a live handle, `y` a C string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn uwoi_orbit_solve_in_n(h: *const UwoiOrbit, y: *const c_char, out: *mut *mut c_char) -> UwoiStatus {
    guard(|| {
        let o = orbit_ref(h)?;
        if out.is_null() {
            return Err(null_out());
        }
        let ym = QMatrix::parse(read_str(y)?)?;
        let n = solve_in_n(&o.data, &ym)?;
        *out = into_c(n.to_text());
        Ok(UwoiStatus::Ok)
    })
}

/// Runs one `uwoi` command (`argv` without the program name) and returns
/// its JSON report. The status is [`UwoiStatus::ChecksFailed`] when the
/// report has failing checks; a report is still written in that case and
/// when a library error occurs.
///
/// # Safety
/// `argv` must point to `argc` valid C strings and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn uwoi_run(argv: *const *const c_char, argc: usize, out: *mut *mut c_char) -> UwoiStatus {
    guard(|| {
        if out.is_null() {
            return Err(null_out());
        }
        if argv.is_null() && argc > 0 {
            return Err(Failure(UwoiStatus::NullPointer, "null argv".into()));
        }
        let mut args = vec!["uwoi".to_string()];
        for i in 0..argc {
            args.push(read_str(*argv.add(i))?.to_string());
        }
        let (outcome, _) = uwoi::cli::run_args(args).map_err(|e| Failure(UwoiStatus::InvalidInput, e.to_string()))?;
        *out = into_c(outcome.render());
        match outcome.code {
            0 => Ok(UwoiStatus::Ok),
            1 => Ok(UwoiStatus::ChecksFailed),
            _ => {
                let code = outcome.json["error"]["code"].as_str().unwrap_or("internal").to_string();
                set_error(outcome.json["error"]["message"].as_str().unwrap_or("error").to_string());
                Ok(status_of_code(&code))
            }
        }
    })
}

fn status_of_code(code: &str) -> UwoiStatus {
    match code {
        "invalid_input" => UwoiStatus::InvalidInput,
        "size_mismatch" => UwoiStatus::SizeMismatch,
        "singular" => UwoiStatus::Singular,
        "not_in_orbit" => UwoiStatus::NotInOrbit,
        "not_adjacent" => UwoiStatus::NotAdjacent,
        "singular_direction" => UwoiStatus::SingularDirection,
        "divergence" => UwoiStatus::Divergence,
        "pole" => UwoiStatus::Pole,
        "boundary" => UwoiStatus::Boundary,
        "unsupported" => UwoiStatus::Unsupported,
        _ => UwoiStatus::Internal,
    }
}

/// Message of the latest failure on this thread, or null. The caller
/// owns the returned string.
#[no_mangle]
pub extern "C" fn uwoi_last_error() -> *mut c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null_mut(), |c| c.clone().into_raw()))
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn uwoi_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
