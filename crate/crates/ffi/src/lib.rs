//! C ABI for the qsteer library.
//!
//! States are opaque handles created by the `qsteer_state_*` constructors
//! and released with `qsteer_state_free`. Every function returns a status
//! code (`QSTEER_OK` on success) and writes results through out-pointers.
//! The matching header lives in `include/qsteer.h`.

use qsteer::correlations::CorrelationError;
use qsteer::state::{StateError, Vec3};
use qsteer::steering::Branch;
use qsteer::{BlochState, Mat3};
use std::ffi::{c_char, c_int, CStr};

pub const QSTEER_OK: c_int = 0;
pub const QSTEER_ERR_NULL_ARGUMENT: c_int = 1;
pub const QSTEER_ERR_PARSE: c_int = 2;
pub const QSTEER_ERR_NON_PHYSICAL: c_int = 3;
pub const QSTEER_ERR_NUMERIC: c_int = 4;
pub const QSTEER_ERR_SINGULAR_FILTER: c_int = 5;
pub const QSTEER_ERR_DEGENERATE_OUTCOME: c_int = 6;
pub const QSTEER_ERR_OUT_OF_DOMAIN: c_int = 7;
pub const QSTEER_ERR_PURE_BOB_MARGINAL: c_int = 8;

pub const QSTEER_BRANCH_CANONICAL: c_int = 0;
pub const QSTEER_BRANCH_Y_EIGVEC: c_int = 1;
pub const QSTEER_BRANCH_XSTATE_SIGMA_Z: c_int = 2;
pub const QSTEER_BRANCH_XSTATE_SIGMA_X: c_int = 3;
pub const QSTEER_BRANCH_XSTATE_INTERIOR: c_int = 4;
pub const QSTEER_BRANCH_NUMERIC: c_int = 5;

/// Opaque two-qubit state handle.
pub struct QsteerState(BlochState);

/// Flat correlation report written by `qsteer_report`.
#[repr(C)]
pub struct QsteerReport {
    pub mutual_info: f64,
    pub classical_corr: f64,
    pub discord: f64,
    pub q_star: f64,
    pub n_discord: [f64; 3],
    pub n_star: [f64; 3],
    pub branch: c_int,
}

fn branch_code(b: Branch) -> c_int {
    match b {
        Branch::Canonical => QSTEER_BRANCH_CANONICAL,
        Branch::YEigvec => QSTEER_BRANCH_Y_EIGVEC,
        Branch::XStateSigmaZ => QSTEER_BRANCH_XSTATE_SIGMA_Z,
        Branch::XStateSigmaX => QSTEER_BRANCH_XSTATE_SIGMA_X,
        Branch::XStateInterior => QSTEER_BRANCH_XSTATE_INTERIOR,
        Branch::Numeric => QSTEER_BRANCH_NUMERIC,
    }
}

fn state_error_code(e: &StateError) -> c_int {
    match e {
        StateError::NotHermitian { .. }
        | StateError::NotUnitTrace { .. }
        | StateError::NonPhysical { .. } => QSTEER_ERR_NON_PHYSICAL,
        StateError::SingularFilter { .. } => QSTEER_ERR_SINGULAR_FILTER,
    }
}

fn correlation_error_code(e: &CorrelationError) -> c_int {
    match e {
        CorrelationError::PureBobMarginal { .. } => QSTEER_ERR_PURE_BOB_MARGINAL,
        CorrelationError::DegenerateOutcome { .. } => QSTEER_ERR_DEGENERATE_OUTCOME,
        CorrelationError::OutOfDomain { .. } => QSTEER_ERR_OUT_OF_DOMAIN,
        CorrelationError::Indeterminate => QSTEER_ERR_NUMERIC,
        CorrelationError::State(se) => state_error_code(se),
    }
}

unsafe fn write_vec3(dst: *mut f64, v: &Vec3) {
    unsafe {
        *dst.add(0) = v.x;
        *dst.add(1) = v.y;
        *dst.add(2) = v.z;
    }
}

/// Build a state from Bloch data: `x`, `y` of length 3 and `t` of length 9
/// (row-major). Fails with `QSTEER_ERR_NON_PHYSICAL` when the triple is not
/// a state.
///
/// # Safety
/// `x`, `y` must point to 3 doubles, `t` to 9, `out` to a writable handle
/// slot.
#[no_mangle]
pub unsafe extern "C" fn qsteer_state_from_bloch(
    x: *const f64,
    y: *const f64,
    t: *const f64,
    out: *mut *mut QsteerState,
) -> c_int {
    if x.is_null() || y.is_null() || t.is_null() || out.is_null() {
        return QSTEER_ERR_NULL_ARGUMENT;
    }
    let xs = unsafe { std::slice::from_raw_parts(x, 3) };
    let ys = unsafe { std::slice::from_raw_parts(y, 3) };
    let ts = unsafe { std::slice::from_raw_parts(t, 9) };
    let state = BlochState::new(
        Vec3::new(xs[0], xs[1], xs[2]),
        Vec3::new(ys[0], ys[1], ys[2]),
        Mat3::from_fn(|i, j| ts[3 * i + j]),
    );
    if let Err(e) = state.to_density_matrix() {
        return state_error_code(&e);
    }
    unsafe { *out = Box::into_raw(Box::new(QsteerState(state))) };
    QSTEER_OK
}

/// Parse a JSON state file (rho or Bloch shape).
///
/// # Safety
/// `text` must be a null-terminated UTF-8 string; `out` a writable slot.
#[no_mangle]
pub unsafe extern "C" fn qsteer_state_from_json(
    text: *const c_char,
    out: *mut *mut QsteerState,
) -> c_int {
    if text.is_null() || out.is_null() {
        return QSTEER_ERR_NULL_ARGUMENT;
    }
    let cstr = unsafe { CStr::from_ptr(text) };
    let Ok(text) = cstr.to_str() else {
        return QSTEER_ERR_PARSE;
    };
    match qsteer::io::parse_state_json(text) {
        Ok(state) => {
            unsafe { *out = Box::into_raw(Box::new(QsteerState(state))) };
            QSTEER_OK
        }
        Err(qsteer::io::IoError::Parse(_)) => QSTEER_ERR_PARSE,
        Err(qsteer::io::IoError::State(se)) => state_error_code(&se),
        Err(qsteer::io::IoError::Io(_)) => QSTEER_ERR_PARSE,
    }
}

/// The two-parameter X-state family; fails with `QSTEER_ERR_OUT_OF_DOMAIN`
/// outside `0 <= a <= 1`, `a - 1 <= b <= 1 - a`.
///
/// # Safety
/// `out` must be a writable handle slot.
#[no_mangle]
pub unsafe extern "C" fn qsteer_two_param_state(
    a: f64,
    b: f64,
    out: *mut *mut QsteerState,
) -> c_int {
    if out.is_null() {
        return QSTEER_ERR_NULL_ARGUMENT;
    }
    match qsteer::two_param_state(a, b) {
        Ok(state) => {
            unsafe { *out = Box::into_raw(Box::new(QsteerState(state))) };
            QSTEER_OK
        }
        Err(e) => correlation_error_code(&e),
    }
}

/// Release a state handle. Null is ignored.
///
/// # Safety
/// `state` must have come from a qsteer constructor and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn qsteer_state_free(state: *mut QsteerState) {
    if !state.is_null() {
        drop(unsafe { Box::from_raw(state) });
    }
}

/// Read back the Bloch data of a handle; `t` is row-major length 9.
///
/// # Safety
/// Pointer contracts as in `qsteer_state_from_bloch`.
#[no_mangle]
pub unsafe extern "C" fn qsteer_state_bloch(
    state: *const QsteerState,
    x: *mut f64,
    y: *mut f64,
    t: *mut f64,
) -> c_int {
    if state.is_null() || x.is_null() || y.is_null() || t.is_null() {
        return QSTEER_ERR_NULL_ARGUMENT;
    }
    let s = unsafe { &(*state).0 };
    unsafe {
        write_vec3(x, &s.x);
        write_vec3(y, &s.y);
        for i in 0..3 {
            for j in 0..3 {
                *t.add(3 * i + j) = s.t[(i, j)];
            }
        }
    }
    QSTEER_OK
}

/// Maximum squared steered-state distance; writes the value, the optimal
/// direction (length 3) and the branch code.
///
/// # Safety
/// Out-pointers must be writable; `direction` has length 3.
#[no_mangle]
pub unsafe extern "C" fn qsteer_max_distance(
    state: *const QsteerState,
    value: *mut f64,
    direction: *mut f64,
    branch: *mut c_int,
) -> c_int {
    if state.is_null() || value.is_null() || direction.is_null() || branch.is_null() {
        return QSTEER_ERR_NULL_ARGUMENT;
    }
    let s = unsafe { &(*state).0 };
    match qsteer::max_distance(s) {
        Ok(r) => {
            unsafe {
                *value = r.value;
                write_vec3(direction, &r.n_star.unit());
                *branch = branch_code(r.branch);
            }
            QSTEER_OK
        }
        Err(_) => QSTEER_ERR_PURE_BOB_MARGINAL,
    }
}

/// Quantum discord on Bob's side and the minimizing direction.
///
/// # Safety
/// Out-pointers must be writable; `direction` has length 3.
#[no_mangle]
pub unsafe extern "C" fn qsteer_discord(
    state: *const QsteerState,
    value: *mut f64,
    direction: *mut f64,
) -> c_int {
    if state.is_null() || value.is_null() || direction.is_null() {
        return QSTEER_ERR_NULL_ARGUMENT;
    }
    let s = unsafe { &(*state).0 };
    match qsteer::discord(s) {
        Ok((v, n)) => {
            unsafe {
                *value = v;
                write_vec3(direction, &n.unit());
            }
            QSTEER_OK
        }
        Err(e) => correlation_error_code(&e),
    }
}

/// Distinguishability-based upper bound on the discord.
///
/// # Safety
/// Out-pointers must be writable; `direction` has length 3.
#[no_mangle]
pub unsafe extern "C" fn qsteer_q_star(
    state: *const QsteerState,
    value: *mut f64,
    direction: *mut f64,
) -> c_int {
    if state.is_null() || value.is_null() || direction.is_null() {
        return QSTEER_ERR_NULL_ARGUMENT;
    }
    let s = unsafe { &(*state).0 };
    match qsteer::q_star(s) {
        Ok((v, n)) => {
            unsafe {
                *value = v;
                write_vec3(direction, &n.unit());
            }
            QSTEER_OK
        }
        Err(e) => correlation_error_code(&e),
    }
}

/// Mutual information in bits.
///
/// # Safety
/// `value` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qsteer_mutual_information(
    state: *const QsteerState,
    value: *mut f64,
) -> c_int {
    if state.is_null() || value.is_null() {
        return QSTEER_ERR_NULL_ARGUMENT;
    }
    unsafe { *value = qsteer::mutual_information(&(*state).0) };
    QSTEER_OK
}

/// Writes 1 when the state has zero discord on Bob's side, 0 otherwise.
///
/// # Safety
/// `result` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qsteer_is_zero_discord(
    state: *const QsteerState,
    result: *mut c_int,
) -> c_int {
    if state.is_null() || result.is_null() {
        return QSTEER_ERR_NULL_ARGUMENT;
    }
    unsafe { *result = qsteer::is_zero_discord(&(*state).0) as c_int };
    QSTEER_OK
}

/// Full correlation report in one call.
///
/// # Safety
/// `report` must point to a writable `QsteerReport`.
#[no_mangle]
pub unsafe extern "C" fn qsteer_report(
    state: *const QsteerState,
    report: *mut QsteerReport,
) -> c_int {
    if state.is_null() || report.is_null() {
        return QSTEER_ERR_NULL_ARGUMENT;
    }
    let s = unsafe { &(*state).0 };
    match qsteer::correlation_report(s) {
        Ok(r) => {
            let nq = r.n_discord.unit();
            let ns = r.n_star.unit();
            unsafe {
                *report = QsteerReport {
                    mutual_info: r.mutual_info,
                    classical_corr: r.classical_corr,
                    discord: r.discord,
                    q_star: r.q_star,
                    n_discord: [nq.x, nq.y, nq.z],
                    n_star: [ns.x, ns.y, ns.z],
                    branch: branch_code(r.branch),
                };
            }
            QSTEER_OK
        }
        Err(e) => correlation_error_code(&e),
    }
}

/// Static, null-terminated description of a status code.
#[no_mangle]
pub extern "C" fn qsteer_strerror(code: c_int) -> *const c_char {
    let text: &'static [u8] = match code {
        QSTEER_OK => b"ok\0",
        QSTEER_ERR_NULL_ARGUMENT => b"null argument\0",
        QSTEER_ERR_PARSE => b"parse error\0",
        QSTEER_ERR_NON_PHYSICAL => b"state is not physical\0",
        QSTEER_ERR_NUMERIC => b"numeric failure\0",
        QSTEER_ERR_SINGULAR_FILTER => b"Bob marginal singular; filtering undefined\0",
        QSTEER_ERR_DEGENERATE_OUTCOME => b"measurement outcome has vanishing probability\0",
        QSTEER_ERR_OUT_OF_DOMAIN => b"parameters outside the family domain\0",
        QSTEER_ERR_PURE_BOB_MARGINAL => b"Bob marginal is pure; optimization undefined\0",
        _ => b"unknown status\0",
    };
    text.as_ptr() as *const c_char
}

/// Library version as a static null-terminated string.
#[no_mangle]
pub extern "C" fn qsteer_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}
