//! C ABI for `xsep`.
//!
//! Objects cross the boundary as opaque handles created by `xsep_*_new`
//! functions and released by the matching `xsep_*_free`. Every fallible call
//! returns an [`XsepStatus`]; on failure a message is kept per thread and
//! can be read with [`xsep_last_error`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use num_complex::Complex64;
use xsep::cli::{LoadedState, StateFile};
use xsep::separability::{check_general, decide_xstate, Outcome, Verdict};
use xsep::{delta, xnorm, DiagVec, HermVec, OptimConfig, XState, XsepError};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum XsepStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidInput = 2,
    Precondition = 3,
    CostGuard = 4,
    Numerical = 5,
    Panic = 6,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum XsepOutcome {
    Separable = 0,
    Entangled = 1,
    PptEntangled = 2,
    Undecided = 3,
}

/// An X-state or a dense state.
pub struct XsepState(LoadedState);

/// Optimization settings.
pub struct XsepConfig(OptimConfig);

/// Result of a separability decision.
pub struct XsepVerdict(Verdict);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &XsepError) -> XsepStatus {
    match e {
        XsepError::CostGuard { .. } => XsepStatus::CostGuard,
        XsepError::Precondition(_) | XsepError::InvalidState(_) => XsepStatus::Precondition,
        XsepError::Lp(_) => XsepStatus::Numerical,
        _ => XsepStatus::InvalidInput,
    }
}

fn fail(status: XsepStatus, msg: impl Into<String>) -> XsepStatus {
    set_error(msg.into());
    status
}

fn guarded(f: impl FnOnce() -> XsepStatus) -> XsepStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            fail(XsepStatus::Panic, msg)
        }
    }
}

/// Message of the last failed call on this thread, or NULL. The pointer is
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn xsep_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn xsep_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

#[no_mangle]
pub extern "C" fn xsep_config_new(seed: u64) -> *mut XsepConfig {
    Box::into_raw(Box::new(XsepConfig(OptimConfig::with_seed(seed))))
}

/// # Safety
/// `config` must be NULL or a handle from [`xsep_config_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn xsep_config_free(config: *mut XsepConfig) {
    if !config.is_null() {
        drop(Box::from_raw(config));
    }
}

/// # Safety
/// `config` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn xsep_config_set_grid(config: *mut XsepConfig, grid: usize) -> XsepStatus {
    match config.as_mut() {
        None => fail(XsepStatus::NullPointer, "config is NULL"),
        Some(_) if grid == 0 => fail(XsepStatus::InvalidInput, "grid must be positive"),
        Some(c) => {
            c.0.grid = grid;
            XsepStatus::Ok
        }
    }
}

/// Builds `X(a, c)` on `n` qubits. `diag`, `anti_re` and `anti_im` each hold
/// `2^n` entries in index order; the anti-diagonal must satisfy
/// `c_ī = conj(c_i)`.
///
/// # Safety
/// The arrays must be readable for `2^n` doubles and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn xsep_state_new_x(
    n: usize,
    diag: *const f64,
    anti_re: *const f64,
    anti_im: *const f64,
    out: *mut *mut XsepState,
) -> XsepStatus {
    guarded(|| {
        if diag.is_null() || anti_re.is_null() || anti_im.is_null() || out.is_null() {
            return fail(XsepStatus::NullPointer, "NULL argument");
        }
        if let Err(e) = xsep::index::check_qubits(n) {
            return fail(status_of(&e), e.to_string());
        }
        let d = 1usize << n;
        let a = std::slice::from_raw_parts(diag, d).to_vec();
        let re = std::slice::from_raw_parts(anti_re, d);
        let im = std::slice::from_raw_parts(anti_im, d);
        let full: Vec<Complex64> = re
            .iter()
            .zip(im)
            .map(|(&r, &i)| Complex64::new(r, i))
            .collect();
        let built = DiagVec::new(n, a).and_then(|a| Ok((a, HermVec::from_full(n, &full, 1e-10)?)));
        match built {
            Ok((a, c)) => {
                *out = Box::into_raw(Box::new(XsepState(LoadedState::X(a, c))));
                XsepStatus::Ok
            }
            Err(e) => fail(status_of(&e), e.to_string()),
        }
    })
}

/// Parses a state file in the JSON format read by the `xsep` command line.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn xsep_state_from_json(
    json: *const c_char,
    out: *mut *mut XsepState,
) -> XsepStatus {
    guarded(|| {
        if json.is_null() || out.is_null() {
            return fail(XsepStatus::NullPointer, "NULL argument");
        }
        let text = match CStr::from_ptr(json).to_str() {
            Ok(t) => t,
            Err(e) => return fail(XsepStatus::InvalidInput, e.to_string()),
        };
        match StateFile::parse(text).and_then(|f| f.load(1e-10)) {
            Ok(s) => {
                *out = Box::into_raw(Box::new(XsepState(s)));
                XsepStatus::Ok
            }
            Err(e) => fail(XsepStatus::InvalidInput, e),
        }
    })
}

/// # Safety
/// `state` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn xsep_state_free(state: *mut XsepState) {
    if !state.is_null() {
        drop(Box::from_raw(state));
    }
}

/// Number of qubits, or 0 for NULL.
///
/// # Safety
/// `state` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn xsep_state_qubits(state: *const XsepState) -> usize {
    match state.as_ref() {
        None => 0,
        Some(XsepState(LoadedState::X(a, _))) => a.n(),
        Some(XsepState(LoadedState::Dense(rho))) => rho.n(),
    }
}

/// Decides separability of an X-state, or applies the X-part criterion to a
/// dense state. `config` may be NULL for defaults.
///
/// # Safety
/// Handles must be live; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn xsep_decide(
    state: *const XsepState,
    config: *const XsepConfig,
    out: *mut *mut XsepVerdict,
) -> XsepStatus {
    guarded(|| {
        let (Some(state), false) = (state.as_ref(), out.is_null()) else {
            return fail(XsepStatus::NullPointer, "NULL argument");
        };
        let cfg = config.as_ref().map(|c| c.0.clone()).unwrap_or_default();
        let result = match &state.0 {
            LoadedState::X(a, c) => XState::new(a.clone(), c.clone())
                .and_then(|x| x.validate_state(1e-10).map(|_| x))
                .and_then(|x| decide_xstate(&x, &cfg)),
            LoadedState::Dense(rho) => check_general(rho, &cfg),
        };
        match result {
            Ok(v) => {
                *out = Box::into_raw(Box::new(XsepVerdict(v)));
                XsepStatus::Ok
            }
            Err(e) => fail(status_of(&e), e.to_string()),
        }
    })
}

/// # Safety
/// `verdict` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn xsep_verdict_free(verdict: *mut XsepVerdict) {
    if !verdict.is_null() {
        drop(Box::from_raw(verdict));
    }
}

/// # Safety
/// `verdict` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn xsep_verdict_outcome(verdict: *const XsepVerdict) -> XsepOutcome {
    match verdict.as_ref().map(|v| v.0.outcome) {
        Some(Outcome::Separable) => XsepOutcome::Separable,
        Some(Outcome::Entangled) => XsepOutcome::Entangled,
        Some(Outcome::PptEntangled) => XsepOutcome::PptEntangled,
        Some(Outcome::Undecided) | None => XsepOutcome::Undecided,
    }
}

/// True when a dense state's X-part passed the separability criterion.
///
/// # Safety
/// `verdict` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn xsep_verdict_criterion_passed(verdict: *const XsepVerdict) -> bool {
    verdict.as_ref().is_some_and(|v| v.0.criterion_passed)
}

/// The verdict with its certificate as JSON. Free with [`xsep_string_free`].
///
/// # Safety
/// `verdict` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn xsep_verdict_to_json(verdict: *const XsepVerdict) -> *mut c_char {
    let Some(v) = verdict.as_ref() else {
        set_error("verdict is NULL".into());
        return ptr::null_mut();
    };
    match serde_json::to_string(&v.0).map(CString::new) {
        Ok(Ok(s)) => s.into_raw(),
        _ => {
            set_error("serialization failed".into());
            ptr::null_mut()
        }
    }
}

/// # Safety
/// `s` must be NULL or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn xsep_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Enclosure `[lower, upper]` of `δ_n(s)` for nonnegative `s` of length `2^n`.
///
/// # Safety
/// `s` readable for `2^n` doubles; `lower` and `upper` writable.
#[no_mangle]
pub unsafe extern "C" fn xsep_delta(
    n: usize,
    s: *const f64,
    config: *const XsepConfig,
    lower: *mut f64,
    upper: *mut f64,
) -> XsepStatus {
    guarded(|| {
        if s.is_null() || lower.is_null() || upper.is_null() {
            return fail(XsepStatus::NullPointer, "NULL argument");
        }
        if let Err(e) = xsep::index::check_qubits(n) {
            return fail(status_of(&e), e.to_string());
        }
        let cfg = config.as_ref().map(|c| c.0.clone()).unwrap_or_default();
        let values = std::slice::from_raw_parts(s, 1usize << n).to_vec();
        match DiagVec::new(n, values).and_then(|s| delta(&s, &cfg)) {
            Ok(b) => {
                *lower = b.lower;
                *upper = b.upper;
                XsepStatus::Ok
            }
            Err(e) => fail(status_of(&e), e.to_string()),
        }
    })
}

/// Enclosure of `‖u‖_X_n`; `re` and `im` hold all `2^n` entries of `u`.
///
/// # Safety
/// Arrays readable for `2^n` doubles; `lower` and `upper` writable.
#[no_mangle]
pub unsafe extern "C" fn xsep_xnorm(
    n: usize,
    re: *const f64,
    im: *const f64,
    config: *const XsepConfig,
    lower: *mut f64,
    upper: *mut f64,
) -> XsepStatus {
    guarded(|| {
        if re.is_null() || im.is_null() || lower.is_null() || upper.is_null() {
            return fail(XsepStatus::NullPointer, "NULL argument");
        }
        if let Err(e) = xsep::index::check_qubits(n) {
            return fail(status_of(&e), e.to_string());
        }
        let cfg = config.as_ref().map(|c| c.0.clone()).unwrap_or_default();
        let d = 1usize << n;
        let full: Vec<Complex64> = std::slice::from_raw_parts(re, d)
            .iter()
            .zip(std::slice::from_raw_parts(im, d))
            .map(|(&r, &i)| Complex64::new(r, i))
            .collect();
        match HermVec::from_full(n, &full, 1e-10) {
            Ok(u) => {
                let b = xnorm(&u, &cfg);
                *lower = b.lower;
                *upper = b.upper;
                XsepStatus::Ok
            }
            Err(e) => fail(status_of(&e), e.to_string()),
        }
    })
}
