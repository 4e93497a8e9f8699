//! C ABI for the `tssr` toolkit.
//!
//! Objects cross the boundary as opaque handles created by `*_new` /
//! `*_from_json` functions and released with the matching `*_free`.
//! Every fallible call returns a [`TssrStatus`]; on failure the message is
//! available from [`tssr_last_error_message`] until the next failing call
//! on the same thread.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::ptr;
use std::slice;

use tssr::analysis::{analyze, AnalysisConfig, Stability};
use tssr::cli::output::trajectory_csv;
use tssr::cli::{parse_system_str, write_linear_system, LinearSystemFile, SystemFile};
use tssr::multirate::{global_clock, MultirateSystem};
use tssr::simulate::{simulate_continuous, simulate_discrete, Method};
use tssr::{Error, Tensor, Trajectory};

/// Result codes.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TssrStatus {
    Ok = 0,
    NullPointer = 1,
    ShapeError = 2,
    ValueError = 3,
    ArgumentError = 4,
    Unsupported = 5,
    NumericOverflow = 6,
    MissingData = 7,
    ParseError = 8,
    IoError = 9,
    Utf8Error = 10,
}

impl From<&Error> for TssrStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::Shape(_) => TssrStatus::ShapeError,
            Error::Value(_) => TssrStatus::ValueError,
            Error::Argument(_) => TssrStatus::ArgumentError,
            Error::Unsupported(_) => TssrStatus::Unsupported,
            Error::NumericOverflow { .. } => TssrStatus::NumericOverflow,
            Error::MissingBoundary { .. } | Error::MissingInput { .. } => TssrStatus::MissingData,
            Error::Parse { .. } => TssrStatus::ParseError,
            Error::Io(_) => TssrStatus::IoError,
        }
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior NULs removed");
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(c));
}

fn fail(e: Error) -> TssrStatus {
    let status = TssrStatus::from(&e);
    set_last_error(e.to_string());
    status
}

fn null(what: &str) -> TssrStatus {
    set_last_error(format!("null pointer: {what}"));
    TssrStatus::NullPointer
}

/// Message of the last failure on this thread, or NULL. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn tssr_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Releases a string returned by this library.
#[no_mangle]
pub unsafe extern "C" fn tssr_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

unsafe fn read_str<'a>(s: *const c_char, what: &str) -> Result<&'a str, TssrStatus> {
    if s.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(s).to_str().map_err(|e| {
        set_last_error(format!("{what} is not valid UTF-8: {e}"));
        TssrStatus::Utf8Error
    })
}

fn into_c_string(s: String) -> *mut c_char {
    CString::new(s).map_or(ptr::null_mut(), CString::into_raw)
}

unsafe fn as_slice<'a, T>(p: *const T, len: usize) -> Option<&'a [T]> {
    if len == 0 {
        Some(&[])
    } else if p.is_null() {
        None
    } else {
        Some(slice::from_raw_parts(p, len))
    }
}

macro_rules! try_status {
    ($e:expr) => {
        match $e {
            Ok(v) => v,
            Err(e) => return fail(e),
        }
    };
}

macro_rules! deref {
    ($p:expr, $what:expr) => {
        match $p.as_ref() {
            Some(v) => v,
            None => return null($what),
        }
    };
}

unsafe fn emit<T>(out: *mut *mut T, value: T) -> TssrStatus {
    *out = Box::into_raw(Box::new(value));
    TssrStatus::Ok
}

// ---------------------------------------------------------------------------
// Tensors

/// Opaque tensor handle.
pub struct TssrTensor(Tensor);

/// Creates a tensor from `order` mode sizes and `len` row-major values.
#[no_mangle]
pub unsafe extern "C" fn tssr_tensor_new(
    shape: *const usize,
    order: usize,
    data: *const f64,
    len: usize,
    out: *mut *mut TssrTensor,
) -> TssrStatus {
    if out.is_null() {
        return null("out");
    }
    let (Some(shape), Some(data)) = (as_slice(shape, order), as_slice(data, len)) else {
        return null("shape or data");
    };
    let t = try_status!(Tensor::new(shape.to_vec(), data.to_vec()));
    emit(out, TssrTensor(t))
}

#[no_mangle]
pub unsafe extern "C" fn tssr_tensor_free(t: *mut TssrTensor) {
    if !t.is_null() {
        drop(Box::from_raw(t));
    }
}

/// Order of a tensor, 0 for NULL.
#[no_mangle]
pub unsafe extern "C" fn tssr_tensor_order(t: *const TssrTensor) -> usize {
    t.as_ref().map_or(0, |t| t.0.order())
}

/// Number of entries, 0 for NULL.
#[no_mangle]
pub unsafe extern "C" fn tssr_tensor_len(t: *const TssrTensor) -> usize {
    t.as_ref().map_or(0, |t| t.0.len())
}

/// Copies the mode sizes into `out`, which must hold `tssr_tensor_order` entries.
#[no_mangle]
pub unsafe extern "C" fn tssr_tensor_shape(t: *const TssrTensor, out: *mut usize, capacity: usize) -> TssrStatus {
    let t = deref!(t, "tensor");
    copy_out(t.0.shape(), out, capacity)
}

/// Copies the row-major data into `out`, which must hold `tssr_tensor_len` entries.
#[no_mangle]
pub unsafe extern "C" fn tssr_tensor_data(t: *const TssrTensor, out: *mut f64, capacity: usize) -> TssrStatus {
    let t = deref!(t, "tensor");
    copy_out(t.0.data(), out, capacity)
}

unsafe fn copy_out<T: Copy>(src: &[T], out: *mut T, capacity: usize) -> TssrStatus {
    if src.is_empty() {
        return TssrStatus::Ok;
    }
    if out.is_null() {
        return null("out");
    }
    if capacity < src.len() {
        return fail(Error::Argument(format!(
            "buffer holds {capacity} entries, {} needed",
            src.len()
        )));
    }
    ptr::copy_nonoverlapping(src.as_ptr(), out, src.len());
    TssrStatus::Ok
}

#[no_mangle]
pub unsafe extern "C" fn tssr_outer_product(
    a: *const TssrTensor,
    b: *const TssrTensor,
    out: *mut *mut TssrTensor,
) -> TssrStatus {
    let (a, b) = (deref!(a, "a"), deref!(b, "b"));
    if out.is_null() {
        return null("out");
    }
    emit(out, TssrTensor(a.0.outer_product(&b.0)))
}

#[no_mangle]
pub unsafe extern "C" fn tssr_contract_pair(
    t: *const TssrTensor,
    axis_a: usize,
    axis_b: usize,
    out: *mut *mut TssrTensor,
) -> TssrStatus {
    let t = deref!(t, "tensor");
    if out.is_null() {
        return null("out");
    }
    emit(out, TssrTensor(try_status!(t.0.contract_pair(axis_a, axis_b))))
}

#[no_mangle]
pub unsafe extern "C" fn tssr_contract_last(
    a: *const TssrTensor,
    x: *const TssrTensor,
    out: *mut *mut TssrTensor,
) -> TssrStatus {
    let (a, x) = (deref!(a, "a"), deref!(x, "x"));
    if out.is_null() {
        return null("out");
    }
    emit(out, TssrTensor(try_status!(a.0.contract_last(&x.0))))
}

#[no_mangle]
pub unsafe extern "C" fn tssr_unfold(t: *const TssrTensor, row_modes: usize, out: *mut *mut TssrTensor) -> TssrStatus {
    let t = deref!(t, "tensor");
    if out.is_null() {
        return null("out");
    }
    emit(out, TssrTensor(try_status!(t.0.unfold(row_modes))))
}

// ---------------------------------------------------------------------------
// Linear systems

/// Opaque handle to a linear system file: system, initial state and input.
pub struct TssrModel(LinearSystemFile);

/// Opaque trajectory handle.
pub struct TssrTrajectory {
    model: LinearSystemFile,
    trajectory: Trajectory,
}

/// Parses a linear system from JSON text in the system file format.
#[no_mangle]
pub unsafe extern "C" fn tssr_model_from_json(json: *const c_char, out: *mut *mut TssrModel) -> TssrStatus {
    let text = match read_str(json, "json") {
        Ok(s) => s,
        Err(status) => return status,
    };
    if out.is_null() {
        return null("out");
    }
    match try_status!(parse_system_str(text, "<json>")) {
        SystemFile::Linear(f) => emit(out, TssrModel(f)),
        SystemFile::Multirate(_) => fail(Error::Argument("JSON describes a multirate system".into())),
    }
}

/// Serializes a model back to JSON. Free the result with `tssr_string_free`.
#[no_mangle]
pub unsafe extern "C" fn tssr_model_to_json(model: *const TssrModel) -> *mut c_char {
    model
        .as_ref()
        .map_or(ptr::null_mut(), |m| into_c_string(write_linear_system(&m.0)))
}

#[no_mangle]
pub unsafe extern "C" fn tssr_model_free(model: *mut TssrModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Product of the state mode sizes.
#[no_mangle]
pub unsafe extern "C" fn tssr_model_state_dim(model: *const TssrModel) -> usize {
    model.as_ref().map_or(0, |m| m.0.system.state_dim())
}

#[no_mangle]
pub unsafe extern "C" fn tssr_model_simulate_discrete(
    model: *const TssrModel,
    steps: usize,
    out: *mut *mut TssrTrajectory,
) -> TssrStatus {
    let m = deref!(model, "model");
    if out.is_null() {
        return null("out");
    }
    let trajectory = try_status!(simulate_discrete(&m.0.system, &m.0.x0, &m.0.input, steps));
    emit(
        out,
        TssrTrajectory {
            model: m.0.clone(),
            trajectory,
        },
    )
}

/// Continuous simulation. `h <= 0` selects the default `t_end/1000`;
/// `exact` non-zero selects the matrix exponential path, zero selects RK4.
#[no_mangle]
pub unsafe extern "C" fn tssr_model_simulate_continuous(
    model: *const TssrModel,
    t_end: f64,
    h: f64,
    exact: i32,
    out: *mut *mut TssrTrajectory,
) -> TssrStatus {
    let m = deref!(model, "model");
    if out.is_null() {
        return null("out");
    }
    let method = if exact != 0 { Method::Exact } else { Method::Rk4 };
    let h = (h > 0.0).then_some(h);
    let trajectory = try_status!(simulate_continuous(&m.0.system, &m.0.x0, &m.0.input, t_end, h, method));
    emit(
        out,
        TssrTrajectory {
            model: m.0.clone(),
            trajectory,
        },
    )
}

#[no_mangle]
pub unsafe extern "C" fn tssr_trajectory_free(t: *mut TssrTrajectory) {
    if !t.is_null() {
        drop(Box::from_raw(t));
    }
}

/// Number of samples, 0 for NULL.
#[no_mangle]
pub unsafe extern "C" fn tssr_trajectory_len(t: *const TssrTrajectory) -> usize {
    t.as_ref().map_or(0, |t| t.trajectory.len())
}

/// Time stamp (step index for discrete systems) of sample `i`.
#[no_mangle]
pub unsafe extern "C" fn tssr_trajectory_time(t: *const TssrTrajectory, i: usize, out: *mut f64) -> TssrStatus {
    let t = deref!(t, "trajectory");
    if out.is_null() {
        return null("out");
    }
    match t.trajectory.samples.get(i) {
        Some(s) => {
            *out = s.when;
            TssrStatus::Ok
        }
        None => fail(Error::Argument(format!("sample {i} out of range"))),
    }
}

/// Copies the state of sample `i` out as a new tensor handle.
#[no_mangle]
pub unsafe extern "C" fn tssr_trajectory_state(
    t: *const TssrTrajectory,
    i: usize,
    out: *mut *mut TssrTensor,
) -> TssrStatus {
    let t = deref!(t, "trajectory");
    if out.is_null() {
        return null("out");
    }
    match t.trajectory.samples.get(i) {
        Some(s) => emit(out, TssrTensor(s.state.clone())),
        None => fail(Error::Argument(format!("sample {i} out of range"))),
    }
}

/// Copies the output of sample `i` out as a new tensor handle.
#[no_mangle]
pub unsafe extern "C" fn tssr_trajectory_output(
    t: *const TssrTrajectory,
    i: usize,
    out: *mut *mut TssrTensor,
) -> TssrStatus {
    let t = deref!(t, "trajectory");
    if out.is_null() {
        return null("out");
    }
    match t.trajectory.samples.get(i) {
        Some(s) => emit(out, TssrTensor(s.output.clone())),
        None => fail(Error::Argument(format!("sample {i} out of range"))),
    }
}

/// Trajectory in the CLI's CSV format. Free with `tssr_string_free`.
#[no_mangle]
pub unsafe extern "C" fn tssr_trajectory_to_csv(t: *const TssrTrajectory, emit_output: i32) -> *mut c_char {
    t.as_ref().map_or(ptr::null_mut(), |t| {
        into_c_string(trajectory_csv(&t.model.system, &t.trajectory, emit_output != 0))
    })
}

// ---------------------------------------------------------------------------
// Analysis

/// Stability verdict.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TssrStability {
    Stable = 0,
    Marginal = 1,
    Unstable = 2,
}

/// Analysis results. Ranks are -1 when the system lacks `B` (controllability)
/// or `C` (observability); `max_real_part` is NaN for discrete systems.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TssrReport {
    pub state_dim: usize,
    pub spectral_radius: f64,
    pub max_real_part: f64,
    pub stability: TssrStability,
    pub controllability_rank: i64,
    pub observability_rank: i64,
}

/// Analyzes a time-invariant model. `rank_tolerance` and `stability_margin`
/// values <= 0 select the defaults (1e-12 and 1e-9).
#[no_mangle]
pub unsafe extern "C" fn tssr_model_analyze(
    model: *const TssrModel,
    rank_tolerance: f64,
    stability_margin: f64,
    out: *mut TssrReport,
) -> TssrStatus {
    let m = deref!(model, "model");
    if out.is_null() {
        return null("out");
    }
    let mut config = AnalysisConfig::default();
    if rank_tolerance > 0.0 {
        config.rank_tolerance = rank_tolerance;
    }
    if stability_margin > 0.0 {
        config.stability_margin = stability_margin;
    }
    let report = try_status!(analyze(&m.0.system, &config));
    let rank = |r: Option<usize>| r.map_or(-1, |r| r as i64);
    *out = TssrReport {
        state_dim: report.state_dim,
        spectral_radius: report.stability.spectral_radius,
        max_real_part: report.stability.max_real_part.unwrap_or(f64::NAN),
        stability: match report.stability.verdict {
            Stability::Stable => TssrStability::Stable,
            Stability::Marginal => TssrStability::Marginal,
            Stability::Unstable => TssrStability::Unstable,
        },
        controllability_rank: rank(report.controllability_rank),
        observability_rank: rank(report.observability_rank),
    };
    TssrStatus::Ok
}

// ---------------------------------------------------------------------------
// Multirate

/// Opaque multirate system handle.
pub struct TssrMultirate(MultirateSystem);

/// Writes `lcm(clocks)` to `period` and `period / clocks[i]` to `factors[i]`.
#[no_mangle]
pub unsafe extern "C" fn tssr_global_clock(
    clocks: *const u64,
    len: usize,
    period: *mut u64,
    factors: *mut u64,
) -> TssrStatus {
    let Some(clocks) = as_slice(clocks, len) else {
        return null("clocks");
    };
    if period.is_null() {
        return null("period");
    }
    let clock = try_status!(global_clock(clocks));
    *period = clock.period;
    copy_out(&clock.factors, factors, len)
}

/// Parses a multirate system from JSON text in the system file format.
#[no_mangle]
pub unsafe extern "C" fn tssr_multirate_from_json(json: *const c_char, out: *mut *mut TssrMultirate) -> TssrStatus {
    let text = match read_str(json, "json") {
        Ok(s) => s,
        Err(status) => return status,
    };
    if out.is_null() {
        return null("out");
    }
    match try_status!(parse_system_str(text, "<json>")) {
        SystemFile::Multirate(m) => emit(out, TssrMultirate(m)),
        SystemFile::Linear(_) => fail(Error::Argument("JSON does not describe a multirate system".into())),
    }
}

#[no_mangle]
pub unsafe extern "C" fn tssr_multirate_free(m: *mut TssrMultirate) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// `x_process(n)`.
#[no_mangle]
pub unsafe extern "C" fn tssr_multirate_eval(
    m: *const TssrMultirate,
    process: usize,
    n: i64,
    out: *mut f64,
) -> TssrStatus {
    let m = deref!(m, "multirate");
    if out.is_null() {
        return null("out");
    }
    *out = try_status!(m.0.evaluator().state(process, n));
    TssrStatus::Ok
}

/// Fills `out` (row-major, `(horizon + 1) × processes`) with the states at
/// global ticks `k·d`, `k = 0..=horizon`.
#[no_mangle]
pub unsafe extern "C" fn tssr_multirate_grid(
    m: *const TssrMultirate,
    horizon: u64,
    out: *mut f64,
    capacity: usize,
) -> TssrStatus {
    let m = deref!(m, "multirate");
    let rows = try_status!(tssr::multirate::trajectory_on_grid(&m.0, horizon));
    let flat: Vec<f64> = rows.into_iter().flatten().collect();
    copy_out(&flat, out, capacity)
}

/// Number of coupled processes, 0 for NULL.
#[no_mangle]
pub unsafe extern "C" fn tssr_multirate_processes(m: *const TssrMultirate) -> usize {
    m.as_ref().map_or(0, |m| m.0.processes())
}
