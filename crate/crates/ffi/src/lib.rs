//! C interface to `qwalk-core`.
//!
//! Walks and states are opaque handles created by `qw_*_new`-style
//! functions and released with the matching `*_free`. Every fallible call
//! returns a [`QwStatus`]; on failure [`qw_last_error`] describes the cause.
//! Output pointers are written only on success.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use qwalk_core::dynamics::{self, State};
use qwalk_core::error::Error;
use qwalk_core::{fixtures, realize, report, spectral, WalkSpec};

/// Result codes.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QwStatus {
    Ok = 0,
    /// A required pointer was null.
    NullPointer = 1,
    /// Malformed input, failed validation or a bad argument.
    Invalid = 2,
    /// Two bands could not be told apart at a near-degeneracy.
    UnresolvedCrossing = 3,
    /// An output buffer is too small.
    BufferTooSmall = 4,
    /// The evolution window would exceed the memory cap.
    MemoryCap = 5,
    /// Any other failure.
    Failed = 6,
    /// A panic was caught at the boundary.
    Panic = 7,
}

/// Opaque walk handle.
pub struct QwWalk {
    spec: WalkSpec,
}

/// Opaque state handle.
pub struct QwState {
    state: State,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> QwStatus {
    match e {
        Error::UnresolvedCrossing { .. } => QwStatus::UnresolvedCrossing,
        Error::MemoryCap { .. } => QwStatus::MemoryCap,
        Error::Malformed(_)
        | Error::Shape { .. }
        | Error::DuplicateShift(_)
        | Error::Empty
        | Error::NotUnitary { .. }
        | Error::DimensionMismatch { .. }
        | Error::InvalidArgument(_)
        | Error::Json(_) => QwStatus::Invalid,
        _ => QwStatus::Failed,
    }
}

fn guard(f: impl FnOnce() -> Result<(), QwStatus>) -> QwStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => QwStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("panic inside qwalk");
            QwStatus::Panic
        }
    }
}

trait OrStatus<T> {
    fn or_status(self) -> Result<T, QwStatus>;
}

impl<T> OrStatus<T> for qwalk_core::Result<T> {
    fn or_status(self) -> Result<T, QwStatus> {
        self.map_err(|e| {
            set_error(&e.to_string());
            status_of(&e)
        })
    }
}

fn non_null<'a, T>(p: *const T) -> Result<&'a T, QwStatus> {
    // SAFETY: callers pass either null or a pointer obtained from this library.
    unsafe { p.as_ref() }.ok_or_else(|| {
        set_error("null pointer argument");
        QwStatus::NullPointer
    })
}

fn out_ptr<'a, T>(p: *mut T) -> Result<&'a mut T, QwStatus> {
    // SAFETY: callers pass either null or a valid, writable pointer.
    unsafe { p.as_mut() }.ok_or_else(|| {
        set_error("null output pointer");
        QwStatus::NullPointer
    })
}

fn c_str<'a>(p: *const c_char) -> Result<&'a str, QwStatus> {
    if p.is_null() {
        set_error("null string argument");
        return Err(QwStatus::NullPointer);
    }
    // SAFETY: non-null and NUL-terminated by contract.
    unsafe { CStr::from_ptr(p) }.to_str().map_err(|_| {
        set_error("string is not valid UTF-8");
        QwStatus::Invalid
    })
}

/// Message for the last failed call on this thread. Valid until the next
/// call into the library from the same thread.
#[no_mangle]
pub extern "C" fn qw_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Parses a walk from its JSON document.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn qw_walk_from_json(json: *const c_char, out: *mut *mut QwWalk) -> QwStatus {
    guard(|| {
        let out = out_ptr(out)?;
        let spec = WalkSpec::from_json(c_str(json)?).or_status()?;
        *out = Box::into_raw(Box::new(QwWalk { spec }));
        Ok(())
    })
}

/// Built-in walk by name, e.g. `grover4` or `coined:0.5`.
///
/// # Safety
/// `name` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn qw_walk_builtin(name: *const c_char, out: *mut *mut QwWalk) -> QwStatus {
    guard(|| {
        let out = out_ptr(out)?;
        let spec = fixtures::by_name(c_str(name)?).or_status()?;
        *out = Box::into_raw(Box::new(QwWalk { spec }));
        Ok(())
    })
}

/// Releases a walk. Null is ignored.
///
/// # Safety
/// `walk` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn qw_walk_free(walk: *mut QwWalk) {
    if !walk.is_null() {
        drop(Box::from_raw(walk));
    }
}

/// Coin dimension `n`.
///
/// # Safety
/// `walk` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qw_walk_dim(walk: *const QwWalk, out: *mut usize) -> QwStatus {
    guard(|| {
        *out_ptr(out)? = non_null(walk)?.spec.n();
        Ok(())
    })
}

/// Largest `|j|` with a nonzero term.
///
/// # Safety
/// `walk` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qw_walk_bandwidth(walk: *const QwWalk, out: *mut usize) -> QwStatus {
    guard(|| {
        *out_ptr(out)? = non_null(walk)?.spec.bandwidth();
        Ok(())
    })
}

/// Writes `Û(k)` row-major as interleaved `(re, im)` pairs into `out`,
/// which must hold `2·n·n` doubles.
///
/// # Safety
/// `walk` must be a live handle and `out` must point to `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn qw_walk_symbol(walk: *const QwWalk, k: f64, out: *mut f64, len: usize) -> QwStatus {
    guard(|| {
        let spec = &non_null(walk)?.spec;
        let n = spec.n();
        if len < 2 * n * n {
            set_error(&format!("buffer holds {len} doubles, need {}", 2 * n * n));
            return Err(QwStatus::BufferTooSmall);
        }
        if out.is_null() {
            set_error("null output pointer");
            return Err(QwStatus::NullPointer);
        }
        let buf = std::slice::from_raw_parts_mut(out, len);
        let m = spec.symbol_at(k).matrix;
        for i in 0..n {
            for j in 0..n {
                buf[2 * (i * n + j)] = m[(i, j)].re;
                buf[2 * (i * n + j) + 1] = m[(i, j)].im;
            }
        }
        Ok(())
    })
}

/// `‖[D, U]‖ = max_k ‖Û′(k)‖`.
///
/// # Safety
/// `walk` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qw_commutator_norm(walk: *const QwWalk, out: *mut f64) -> QwStatus {
    guard(|| {
        *out_ptr(out)? = non_null(walk)?.spec.commutator_norm();
        Ok(())
    })
}

/// Winding number of `k ↦ det Û(k)`.
///
/// # Safety
/// `walk` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qw_det_winding(walk: *const QwWalk, grid: usize, out: *mut i64) -> QwStatus {
    guard(|| {
        let out = out_ptr(out)?;
        *out = spectral::det_winding(&non_null(walk)?.spec, grid).or_status()?;
        Ok(())
    })
}

/// Whether every band has winding zero.
///
/// # Safety
/// `walk` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qw_is_realizable(walk: *const QwWalk, grid: usize, out: *mut bool) -> QwStatus {
    guard(|| {
        let out = out_ptr(out)?;
        *out = realize::is_ct_realizable(&non_null(walk)?.spec, grid).or_status()?.realizable;
        Ok(())
    })
}

/// Full analysis report as a JSON string, released with [`qw_string_free`].
///
/// # Safety
/// `walk` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qw_analyze_json(walk: *const QwWalk, grid: usize, out: *mut *mut c_char) -> QwStatus {
    guard(|| {
        let out = out_ptr(out)?;
        let json = report::analyze(&non_null(walk)?.spec, grid).or_status()?.report().to_json();
        *out = CString::new(json).map_err(|_| QwStatus::Failed)?.into_raw();
        Ok(())
    })
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn qw_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Built-in state (`e1`..`en`, `uniform`, `random`) for coin dimension `n`.
///
/// # Safety
/// `name` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qw_state_builtin(
    name: *const c_char,
    n: usize,
    seed: u64,
    out: *mut *mut QwState,
) -> QwStatus {
    guard(|| {
        let out = out_ptr(out)?;
        let state = State::builtin(c_str(name)?, n, seed).or_status()?;
        *out = Box::into_raw(Box::new(QwState { state }));
        Ok(())
    })
}

/// Parses a state from `{"entries":[{"site":x,"vector":[[re,im],…]},…]}`.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qw_state_from_json(json: *const c_char, out: *mut *mut QwState) -> QwStatus {
    guard(|| {
        let out = out_ptr(out)?;
        let state = State::from_json(c_str(json)?).or_status()?;
        *out = Box::into_raw(Box::new(QwState { state }));
        Ok(())
    })
}

/// Releases a state. Null is ignored.
///
/// # Safety
/// `state` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn qw_state_free(state: *mut QwState) {
    if !state.is_null() {
        drop(Box::from_raw(state));
    }
}

/// `Uᵗ ξ` as a new state.
///
/// # Safety
/// `walk` and `state` must be live handles and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qw_evolve(
    walk: *const QwWalk,
    state: *const QwState,
    steps: usize,
    out: *mut *mut QwState,
) -> QwStatus {
    guard(|| {
        let out = out_ptr(out)?;
        let next = dynamics::evolve(&non_null(walk)?.spec, &non_null(state)?.state, steps).or_status()?;
        *out = Box::into_raw(Box::new(QwState { state: next }));
        Ok(())
    })
}

/// `‖ξ‖₂`.
///
/// # Safety
/// `state` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qw_state_norm(state: *const QwState, out: *mut f64) -> QwStatus {
    guard(|| {
        *out_ptr(out)? = non_null(state)?.state.norm();
        Ok(())
    })
}

/// `Σ_x (x/t)^m ‖ξ_x‖²`.
///
/// # Safety
/// `state` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qw_state_moment(state: *const QwState, t: u64, m: u32, out: *mut f64) -> QwStatus {
    guard(|| {
        let out = out_ptr(out)?;
        let snap = dynamics::position_distribution(&non_null(state)?.state, t).or_status()?;
        *out = dynamics::empirical_moment(&snap, m);
        Ok(())
    })
}
