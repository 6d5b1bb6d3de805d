//! C ABI over `qdt-core`.
//!
//! States are passed around as opaque `QdtState` handles created by one of
//! the `qdt_state_*` constructors and released with [`qdt_state_free`].
//! Every fallible call returns a [`QdtStatus`]; on failure the message is
//! available from [`qdt_last_error`] on the same thread until the next call.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use num_complex::Complex64;
use qdt_core::file::parse_prospect_file;
use qdt_core::measure::{entanglement_production_with, Method, WARN_NEGATIVE_FORMULA};
use qdt_core::{
    maximal_entanglement, multimode_entanglement, make_multimode_state, subnorm_variational,
    LogBase, OptimizerOptions, ProspectState, QdtError,
};

/// Opaque prospect state.
pub struct QdtState {
    inner: ProspectState,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QdtStatus {
    Ok = 0,
    NullPointer = 1,
    Shape = 2,
    Index = 3,
    Degenerate = 4,
    NonFinite = 5,
    InvalidRing = 6,
    InvalidOptions = 7,
    NumericFailure = 8,
    Capacity = 9,
    Parse = 10,
    Validation = 11,
    Panic = 12,
}

impl From<&QdtError> for QdtStatus {
    fn from(e: &QdtError) -> Self {
        match e {
            QdtError::Shape(_) => QdtStatus::Shape,
            QdtError::Index(_) => QdtStatus::Index,
            QdtError::Degenerate(_) => QdtStatus::Degenerate,
            QdtError::NonFinite(_) => QdtStatus::NonFinite,
            QdtError::InvalidRing(_) => QdtStatus::InvalidRing,
            QdtError::InvalidOptions(_) => QdtStatus::InvalidOptions,
            QdtError::NumericFailure { .. } => QdtStatus::NumericFailure,
            QdtError::Capacity(_) => QdtStatus::Capacity,
        }
    }
}

/// Optimizer settings; see [`qdt_default_options`].
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct QdtOptions {
    pub restarts: usize,
    pub max_iterations: usize,
    pub tolerance: f64,
    pub seed: u64,
}

impl From<QdtOptions> for OptimizerOptions {
    fn from(o: QdtOptions) -> Self {
        OptimizerOptions {
            restarts: o.restarts,
            max_iterations: o.max_iterations,
            tolerance: o.tolerance,
            seed: o.seed,
        }
    }
}

/// Result of [`qdt_entanglement_production`] with both methods.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct QdtMeasurement {
    pub epsilon_formula: f64,
    pub epsilon_variational: f64,
    pub subnorm_full_formula: f64,
    pub subnorm_full_variational: f64,
    pub subnorm_nonentangling: f64,
    pub trace: f64,
    pub log_base: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Single action; both epsilons are 0 by definition.
    pub degenerate: bool,
    pub negative_formula: bool,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn fail(status: QdtStatus, msg: impl Into<String>) -> QdtStatus {
    set_error(msg);
    status
}

fn from_core(e: QdtError) -> QdtStatus {
    fail(QdtStatus::from(&e), e.to_string())
}

fn guard<F: FnOnce() -> QdtStatus>(f: F) -> QdtStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| fail(QdtStatus::Panic, "internal panic"))
}

unsafe fn amplitudes(re: *const f64, im: *const f64, len: usize) -> Option<Vec<Complex64>> {
    if len == 0 {
        return Some(Vec::new());
    }
    if re.is_null() {
        return None;
    }
    let re = std::slice::from_raw_parts(re, len);
    let im = if im.is_null() { None } else { Some(std::slice::from_raw_parts(im, len)) };
    Some(
        (0..len)
            .map(|k| Complex64::new(re[k], im.map_or(0.0, |v| v[k])))
            .collect(),
    )
}

fn emit_state(state: ProspectState, out: *mut *mut QdtState) -> QdtStatus {
    unsafe { *out = Box::into_raw(Box::new(QdtState { inner: state })) };
    QdtStatus::Ok
}

/// Message for the last failed call on this thread, or NULL. The pointer is
/// valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn qdt_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

#[no_mangle]
pub extern "C" fn qdt_default_options() -> QdtOptions {
    let d = OptimizerOptions::default();
    QdtOptions {
        restarts: d.restarts,
        max_iterations: d.max_iterations,
        tolerance: d.tolerance,
        seed: d.seed,
    }
}

/// Dense state over `n_actions` actions with mode counts `dims`. `re` and
/// `im` hold `len = ∏ dims` row-major coefficients; `im` may be NULL for a
/// real state.
///
/// # Safety
/// `dims` must point to `n_actions` values, `re` (and `im` when non-NULL) to
/// `len` values, and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qdt_state_new(
    dims: *const usize,
    n_actions: usize,
    re: *const f64,
    im: *const f64,
    len: usize,
    out: *mut *mut QdtState,
) -> QdtStatus {
    guard(|| {
        if dims.is_null() || out.is_null() {
            return fail(QdtStatus::NullPointer, "dims and out must not be NULL");
        }
        let dims = std::slice::from_raw_parts(dims, n_actions);
        let Some(data) = amplitudes(re, im, len) else {
            return fail(QdtStatus::NullPointer, "re must not be NULL");
        };
        match ProspectState::from_dense(dims, data) {
            Ok(s) => emit_state(s, out),
            Err(e) => from_core(e),
        }
    })
}

/// Multimode state Σ_μ b_μ |μ…μ⟩ on `n_actions` actions with `modes` modes.
///
/// # Safety
/// `re` (and `im` when non-NULL) must point to `modes` values; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qdt_state_multimode(
    n_actions: usize,
    modes: usize,
    re: *const f64,
    im: *const f64,
    out: *mut *mut QdtState,
) -> QdtStatus {
    guard(|| {
        if out.is_null() {
            return fail(QdtStatus::NullPointer, "out must not be NULL");
        }
        let Some(b) = amplitudes(re, im, modes) else {
            return fail(QdtStatus::NullPointer, "re must not be NULL");
        };
        match make_multimode_state(n_actions, modes, &b) {
            Ok(s) => emit_state(s, out),
            Err(e) => from_core(e),
        }
    })
}

/// Parses a prospect document (`len` bytes of JSON text).
///
/// # Safety
/// `text` must point to `len` readable bytes; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qdt_state_from_document(
    text: *const c_char,
    len: usize,
    out: *mut *mut QdtState,
) -> QdtStatus {
    guard(|| {
        if text.is_null() || out.is_null() {
            return fail(QdtStatus::NullPointer, "text and out must not be NULL");
        }
        let bytes = std::slice::from_raw_parts(text as *const u8, len);
        match parse_prospect_file(bytes) {
            Ok(p) => emit_state(p.state, out),
            Err(e) => {
                let status = if e.exit_code() == 1 { QdtStatus::Parse } else { QdtStatus::Validation };
                fail(status, e.to_string())
            }
        }
    })
}

/// Releases a state. NULL is ignored.
///
/// # Safety
/// `state` must come from a `qdt_state_*` constructor and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn qdt_state_free(state: *mut QdtState) {
    if !state.is_null() {
        drop(Box::from_raw(state));
    }
}

/// Number of actions, or 0 for NULL.
///
/// # Safety
/// `state` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn qdt_state_action_count(state: *const QdtState) -> usize {
    state.as_ref().map_or(0, |s| s.inner.action_count())
}

/// Copies up to `cap` mode counts into `out`; returns the number of actions.
///
/// # Safety
/// `state` must be NULL or a live handle; `out` must have room for `cap` values.
#[no_mangle]
pub unsafe extern "C" fn qdt_state_mode_counts(state: *const QdtState, out: *mut usize, cap: usize) -> usize {
    let Some(s) = state.as_ref() else { return 0 };
    let dims = s.inner.dims();
    if !out.is_null() {
        let n = dims.len().min(cap);
        ptr::copy_nonoverlapping(dims.as_ptr(), out, n);
    }
    dims.len()
}

/// Variational restricted norm. `opts` may be NULL for defaults.
///
/// # Safety
/// `state` must be a live handle, `opts` NULL or readable, `value` writable.
#[no_mangle]
pub unsafe extern "C" fn qdt_subnorm_variational(
    state: *const QdtState,
    opts: *const QdtOptions,
    value: *mut f64,
) -> QdtStatus {
    guard(|| {
        let (Some(s), false) = (state.as_ref(), value.is_null()) else {
            return fail(QdtStatus::NullPointer, "state and value must not be NULL");
        };
        let opts = opts.as_ref().copied().unwrap_or_else(|| qdt_default_options());
        match subnorm_variational(&s.inner, &opts.into()) {
            Ok(r) => {
                *value = r.value;
                QdtStatus::Ok
            }
            Err(e) => from_core(e),
        }
    })
}

/// Entanglement production by both methods. `opts` may be NULL for defaults.
///
/// # Safety
/// `state` must be a live handle, `opts` NULL or readable, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qdt_entanglement_production(
    state: *const QdtState,
    opts: *const QdtOptions,
    log_base: f64,
    out: *mut QdtMeasurement,
) -> QdtStatus {
    guard(|| {
        let (Some(s), false) = (state.as_ref(), out.is_null()) else {
            return fail(QdtStatus::NullPointer, "state and out must not be NULL");
        };
        let base = match LogBase::new(log_base) {
            Ok(b) => b,
            Err(e) => return from_core(e),
        };
        let opts = opts.as_ref().copied().unwrap_or_else(|| qdt_default_options());
        match entanglement_production_with(&s.inner, base, &opts.into(), Method::Both) {
            Ok(r) => {
                let diag = r.optimizer.as_ref();
                *out = QdtMeasurement {
                    epsilon_formula: r.epsilon_formula.unwrap_or(f64::NAN),
                    epsilon_variational: r.epsilon_variational.unwrap_or(f64::NAN),
                    subnorm_full_formula: r.subnorm_full_formula.unwrap_or(f64::NAN),
                    subnorm_full_variational: r.subnorm_full_variational.unwrap_or(f64::NAN),
                    subnorm_nonentangling: r.subnorm_nonentangling,
                    trace: r.trace,
                    log_base: base.value(),
                    iterations: diag.map_or(0, |d| d.iterations),
                    converged: diag.is_some_and(|d| d.converged),
                    degenerate: r.degenerate,
                    negative_formula: r.warnings.iter().any(|w| w == WARN_NEGATIVE_FORMULA),
                };
                QdtStatus::Ok
            }
            Err(e) => from_core(e),
        }
    })
}

/// Full report as a JSON string; release it with [`qdt_string_free`].
///
/// # Safety
/// `state` must be a live handle, `opts` NULL or readable, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qdt_entanglement_report_json(
    state: *const QdtState,
    opts: *const QdtOptions,
    log_base: f64,
    out: *mut *mut c_char,
) -> QdtStatus {
    guard(|| {
        let (Some(s), false) = (state.as_ref(), out.is_null()) else {
            return fail(QdtStatus::NullPointer, "state and out must not be NULL");
        };
        let base = match LogBase::new(log_base) {
            Ok(b) => b,
            Err(e) => return from_core(e),
        };
        let opts = opts.as_ref().copied().unwrap_or_else(|| qdt_default_options());
        match entanglement_production_with(&s.inner, base, &opts.into(), Method::Both) {
            Ok(r) => {
                let text = qdt_core::measure::report_to_json(&r);
                *out = CString::new(text).expect("JSON has no NUL").into_raw();
                QdtStatus::Ok
            }
            Err(e) => from_core(e),
        }
    })
}

/// # Safety
/// `s` must be NULL or a string returned by this library, freed once.
#[no_mangle]
pub unsafe extern "C" fn qdt_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// (N−1)·log_base(M).
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qdt_maximal_entanglement(
    n_actions: usize,
    modes: usize,
    log_base: f64,
    out: *mut f64,
) -> QdtStatus {
    guard(|| {
        if out.is_null() {
            return fail(QdtStatus::NullPointer, "out must not be NULL");
        }
        match LogBase::new(log_base).and_then(|b| maximal_entanglement(n_actions, modes, b)) {
            Ok(v) => {
                *out = v;
                QdtStatus::Ok
            }
            Err(e) => from_core(e),
        }
    })
}

/// (N−1)·log_base(Σ|b_μ|² / max|b_μ|²) for `modes` branch amplitudes.
///
/// # Safety
/// `re` (and `im` when non-NULL) must point to `modes` values; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qdt_multimode_entanglement(
    re: *const f64,
    im: *const f64,
    modes: usize,
    n_actions: usize,
    log_base: f64,
    out: *mut f64,
) -> QdtStatus {
    guard(|| {
        if out.is_null() {
            return fail(QdtStatus::NullPointer, "out must not be NULL");
        }
        let Some(b) = amplitudes(re, im, modes) else {
            return fail(QdtStatus::NullPointer, "re must not be NULL");
        };
        match LogBase::new(log_base).and_then(|base| multimode_entanglement(&b, n_actions, base)) {
            Ok(v) => {
                *out = v;
                QdtStatus::Ok
            }
            Err(e) => from_core(e),
        }
    })
}
