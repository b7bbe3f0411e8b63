//! C ABI over the `perron` solvers: opaque handles, status codes, and a
//! thread-local detail message. The matching header lives at
//! `include/perron.h`.
//!
//! Ownership rules: every `*_create`/`*_from_file`/`*_solve_*` out-pointer
//! hands the caller an owned handle that must be released with the matching
//! `*_free`; getters never transfer ownership. Handles are immutable after
//! creation and safe to share across threads for reads.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::path::Path;
use std::ptr;

use perron::nqz::{nqz_solve, NqzConfig, NqzTermination};
use perron::{
    parse_tensor_file, solve_perron, DenseTensor, PerronError, SolverConfig, Termination,
};

/// Status code returned by every fallible entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PerronStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidArgument = 2,
    NegativeEntry = 3,
    ZeroTensor = 4,
    DimensionMismatch = 5,
    SingularMatrix = 6,
    Io = 7,
    Parse = 8,
    InvalidUtf8 = 9,
    BufferTooSmall = 10,
}

/// How a solve ended; see `perron_report_termination`.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PerronTermination {
    Converged = 0,
    IterationLimit = 1,
    PathFailure = 2,
    DegenerateIterate = 3,
}

/// Homotopy solver options; zero-initialize and overwrite, or start from
/// `perron_homotopy_options_default`.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct PerronHomotopyOptions {
    pub dt0: f64,
    pub eps1: f64,
    pub eps2: f64,
    pub dt_min: f64,
    pub dt_max: f64,
    pub newton_budget_per_step: usize,
    pub max_steps: usize,
}

/// NQZ options; `shift` is applied to the preprocessed tensor (0 = plain
/// method, 1 = identity-shift strategy).
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct PerronNqzOptions {
    pub tol: f64,
    pub max_iters: usize,
    pub shift: f64,
}

/// Opaque tensor handle.
pub struct PerronTensor(DenseTensor);

/// Opaque solve-report handle (homotopy or NQZ).
pub struct PerronReport {
    lambda: f64,
    x: Vec<f64>,
    residual: f64,
    iterations: usize,
    newton_total: usize,
    scale: f64,
    termination: PerronTermination,
    reducibility_warning: bool,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg).unwrap_or_else(|_| CString::new("invalid error text").unwrap());
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(c));
}

fn fail(status: PerronStatus, msg: impl Into<String>) -> PerronStatus {
    set_error(msg.into());
    status
}

fn status_of(e: &PerronError) -> PerronStatus {
    match e {
        PerronError::DimensionMismatch { .. } => PerronStatus::DimensionMismatch,
        PerronError::NegativeEntry { .. }
        | PerronError::NonPositiveVector { .. }
        | PerronError::NegativePower { .. } => PerronStatus::NegativeEntry,
        PerronError::ZeroTensor => PerronStatus::ZeroTensor,
        PerronError::SingularMatrix { .. } => PerronStatus::SingularMatrix,
        PerronError::Parse(_) => PerronStatus::Parse,
        PerronError::Io(_) => PerronStatus::Io,
        _ => PerronStatus::InvalidArgument,
    }
}

fn fail_with(e: PerronError) -> PerronStatus {
    let status = status_of(&e);
    set_error(e.to_string());
    status
}

/// Pointer to a NUL-terminated description of the last failure on this
/// thread, or NULL if none. Valid until the next failing call on the thread.
#[no_mangle]
pub extern "C" fn perron_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| {
        slot.borrow()
            .as_ref()
            .map(|c| c.as_ptr())
            .unwrap_or(ptr::null())
    })
}

/// Builds a dense tensor from `len = dim^order` row-major entries.
///
/// # Safety
/// `entries` must point to `len` readable doubles; `out` must be a valid
/// out-pointer.
#[no_mangle]
pub unsafe extern "C" fn perron_tensor_create(
    order: usize,
    dim: usize,
    entries: *const f64,
    len: usize,
    out: *mut *mut PerronTensor,
) -> PerronStatus {
    if out.is_null() {
        return fail(PerronStatus::NullArgument, "out pointer is null");
    }
    unsafe { *out = ptr::null_mut() };
    if entries.is_null() {
        return fail(PerronStatus::NullArgument, "entries pointer is null");
    }
    let data = unsafe { std::slice::from_raw_parts(entries, len) }.to_vec();
    match DenseTensor::new(order, dim, data) {
        Ok(t) => {
            unsafe { *out = Box::into_raw(Box::new(PerronTensor(t))) };
            PerronStatus::Ok
        }
        Err(e) => fail_with(e),
    }
}

/// Parses a tensor file (see the text format in the crate README).
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be a valid out-pointer.
#[no_mangle]
pub unsafe extern "C" fn perron_tensor_from_file(
    path: *const c_char,
    out: *mut *mut PerronTensor,
) -> PerronStatus {
    if out.is_null() {
        return fail(PerronStatus::NullArgument, "out pointer is null");
    }
    unsafe { *out = ptr::null_mut() };
    if path.is_null() {
        return fail(PerronStatus::NullArgument, "path is null");
    }
    let path = match unsafe { CStr::from_ptr(path) }.to_str() {
        Ok(s) => s,
        Err(_) => return fail(PerronStatus::InvalidUtf8, "path is not valid UTF-8"),
    };
    match parse_tensor_file(Path::new(path)) {
        Ok(t) => {
            unsafe { *out = Box::into_raw(Box::new(PerronTensor(t))) };
            PerronStatus::Ok
        }
        Err(e) => fail_with(e),
    }
}

/// # Safety
/// `tensor` must be a live handle from this library (or NULL).
#[no_mangle]
pub unsafe extern "C" fn perron_tensor_order(tensor: *const PerronTensor) -> usize {
    if tensor.is_null() {
        return 0;
    }
    unsafe { &*tensor }.0.order()
}

/// # Safety
/// `tensor` must be a live handle from this library (or NULL).
#[no_mangle]
pub unsafe extern "C" fn perron_tensor_dim(tensor: *const PerronTensor) -> usize {
    if tensor.is_null() {
        return 0;
    }
    unsafe { &*tensor }.0.dim()
}

/// Releases a tensor handle; NULL is a no-op.
///
/// # Safety
/// `tensor` must be NULL or an owned handle not used afterwards.
#[no_mangle]
pub unsafe extern "C" fn perron_tensor_free(tensor: *mut PerronTensor) {
    if !tensor.is_null() {
        drop(unsafe { Box::from_raw(tensor) });
    }
}

#[no_mangle]
pub extern "C" fn perron_homotopy_options_default() -> PerronHomotopyOptions {
    let d = SolverConfig::default();
    PerronHomotopyOptions {
        dt0: d.dt0,
        eps1: d.eps1,
        eps2: d.eps2,
        dt_min: d.dt_min,
        dt_max: d.dt_max,
        newton_budget_per_step: d.newton_budget_per_step,
        max_steps: d.max_steps,
    }
}

#[no_mangle]
pub extern "C" fn perron_nqz_options_default() -> PerronNqzOptions {
    let d = NqzConfig::default();
    PerronNqzOptions {
        tol: d.tol,
        max_iters: d.max_iters,
        shift: d.shift,
    }
}

/// Runs the homotopy solver; `options` may be NULL for defaults. On success
/// the caller owns `*out`. A non-converged run still returns a report; check
/// `perron_report_termination`.
///
/// # Safety
/// `tensor` must be a live handle; `out` must be a valid out-pointer.
#[no_mangle]
pub unsafe extern "C" fn perron_solve_homotopy(
    tensor: *const PerronTensor,
    options: *const PerronHomotopyOptions,
    out: *mut *mut PerronReport,
) -> PerronStatus {
    if out.is_null() {
        return fail(PerronStatus::NullArgument, "out pointer is null");
    }
    unsafe { *out = ptr::null_mut() };
    if tensor.is_null() {
        return fail(PerronStatus::NullArgument, "tensor is null");
    }
    let tensor = &unsafe { &*tensor }.0;
    let mut cfg = SolverConfig::default();
    if !options.is_null() {
        let o = unsafe { &*options };
        cfg.dt0 = o.dt0;
        cfg.eps1 = o.eps1;
        cfg.eps2 = o.eps2;
        cfg.dt_min = o.dt_min;
        cfg.dt_max = o.dt_max;
        cfg.newton_budget_per_step = o.newton_budget_per_step;
        cfg.max_steps = o.max_steps;
    }
    match solve_perron(tensor, &cfg) {
        Ok(r) => {
            let report = PerronReport {
                lambda: r.pair.lambda,
                x: r.pair.x.clone(),
                residual: r.residual,
                iterations: r.steps,
                newton_total: r.newton_total,
                scale: r.scale,
                termination: match r.termination {
                    Termination::Converged => PerronTermination::Converged,
                    Termination::StepLimit => PerronTermination::IterationLimit,
                    Termination::PathFailure => PerronTermination::PathFailure,
                },
                reducibility_warning: r.reducibility_warning,
            };
            unsafe { *out = Box::into_raw(Box::new(report)) };
            PerronStatus::Ok
        }
        Err(e) => fail_with(e),
    }
}

/// Runs the NQZ baseline; `options` may be NULL for defaults.
///
/// # Safety
/// `tensor` must be a live handle; `out` must be a valid out-pointer.
#[no_mangle]
pub unsafe extern "C" fn perron_solve_nqz(
    tensor: *const PerronTensor,
    options: *const PerronNqzOptions,
    out: *mut *mut PerronReport,
) -> PerronStatus {
    if out.is_null() {
        return fail(PerronStatus::NullArgument, "out pointer is null");
    }
    unsafe { *out = ptr::null_mut() };
    if tensor.is_null() {
        return fail(PerronStatus::NullArgument, "tensor is null");
    }
    let tensor = &unsafe { &*tensor }.0;
    let mut cfg = NqzConfig::default();
    if !options.is_null() {
        let o = unsafe { &*options };
        cfg.tol = o.tol;
        cfg.max_iters = o.max_iters;
        cfg.shift = o.shift;
    }
    match nqz_solve(tensor, &cfg) {
        Ok(r) => {
            let report = PerronReport {
                lambda: r.pair.lambda,
                x: r.pair.x.clone(),
                residual: r.residual,
                iterations: r.iters,
                newton_total: 0,
                scale: 1.0,
                termination: match r.termination {
                    NqzTermination::Converged => PerronTermination::Converged,
                    NqzTermination::IterationCap => PerronTermination::IterationLimit,
                    NqzTermination::DegenerateIterate => PerronTermination::DegenerateIterate,
                },
                reducibility_warning: false,
            };
            unsafe { *out = Box::into_raw(Box::new(report)) };
            PerronStatus::Ok
        }
        Err(e) => fail_with(e),
    }
}

/// # Safety
/// `report` must be a live handle (or NULL, yielding NaN/zero).
#[no_mangle]
pub unsafe extern "C" fn perron_report_lambda(report: *const PerronReport) -> f64 {
    if report.is_null() {
        return f64::NAN;
    }
    unsafe { &*report }.lambda
}

/// # Safety
/// `report` must be a live handle (or NULL, yielding NaN/zero).
#[no_mangle]
pub unsafe extern "C" fn perron_report_residual(report: *const PerronReport) -> f64 {
    if report.is_null() {
        return f64::NAN;
    }
    unsafe { &*report }.residual
}

/// Prediction-correction steps (homotopy) or iterations (NQZ).
///
/// # Safety
/// `report` must be a live handle (or NULL, yielding NaN/zero).
#[no_mangle]
pub unsafe extern "C" fn perron_report_iterations(report: *const PerronReport) -> usize {
    if report.is_null() {
        return 0;
    }
    unsafe { &*report }.iterations
}

/// Total Newton updates (0 for NQZ reports).
///
/// # Safety
/// `report` must be a live handle (or NULL, yielding NaN/zero).
#[no_mangle]
pub unsafe extern "C" fn perron_report_newton_total(report: *const PerronReport) -> usize {
    if report.is_null() {
        return 0;
    }
    unsafe { &*report }.newton_total
}

/// Preprocessing factor tau (1 for NQZ reports, which rescale internally).
///
/// # Safety
/// `report` must be a live handle (or NULL, yielding NaN/zero).
#[no_mangle]
pub unsafe extern "C" fn perron_report_scale(report: *const PerronReport) -> f64 {
    if report.is_null() {
        return f64::NAN;
    }
    unsafe { &*report }.scale
}

/// # Safety
/// `report` must be a live handle (or NULL, treated as a path failure).
#[no_mangle]
pub unsafe extern "C" fn perron_report_termination(
    report: *const PerronReport,
) -> PerronTermination {
    if report.is_null() {
        return PerronTermination::PathFailure;
    }
    unsafe { &*report }.termination
}

/// 1 when the weak-irreducibility diagnostic failed for the solved tensor.
///
/// # Safety
/// `report` must be a live handle (or NULL, yielding 0).
#[no_mangle]
pub unsafe extern "C" fn perron_report_reducibility_warning(report: *const PerronReport) -> i32 {
    if report.is_null() {
        return 0;
    }
    unsafe { &*report }.reducibility_warning as i32
}

/// Eigenvector length.
///
/// # Safety
/// `report` must be a live handle (or NULL, yielding 0).
#[no_mangle]
pub unsafe extern "C" fn perron_report_dim(report: *const PerronReport) -> usize {
    if report.is_null() {
        return 0;
    }
    unsafe { &*report }.x.len()
}

/// Copies the eigenvector into `out`; `len` must be at least
/// `perron_report_dim(report)`.
///
/// # Safety
/// `out` must point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn perron_report_eigenvector(
    report: *const PerronReport,
    out: *mut f64,
    len: usize,
) -> PerronStatus {
    if report.is_null() || out.is_null() {
        return fail(PerronStatus::NullArgument, "report or out pointer is null");
    }
    let x = &unsafe { &*report }.x;
    if len < x.len() {
        return fail(
            PerronStatus::BufferTooSmall,
            format!("need {} slots, got {len}", x.len()),
        );
    }
    unsafe { ptr::copy_nonoverlapping(x.as_ptr(), out, x.len()) };
    PerronStatus::Ok
}

/// Releases a report handle; NULL is a no-op.
///
/// # Safety
/// `report` must be NULL or an owned handle not used afterwards.
#[no_mangle]
pub unsafe extern "C" fn perron_report_free(report: *mut PerronReport) {
    if !report.is_null() {
        drop(unsafe { Box::from_raw(report) });
    }
}
