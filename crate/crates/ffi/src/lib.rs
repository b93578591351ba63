//! C ABI over the greenjsp library.
//!
//! Instances and trained models cross the boundary as opaque handles created
//! by `*_read` / `*_from_json` and released with the matching `*_free`.
//! Every fallible call returns a `GjStatus`; on failure the message is kept
//! per thread and can be fetched with `gj_last_error_message`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use greenjsp::ml::{select_and_solve, TrainedModel};
use greenjsp::{
    allocate_budget, extract_features, solve, Budget, Characteristics, ClockMode, Error, Instance, SolveStatus,
    SolverId, N_FEATURES,
};

/// Number of features written by `gj_features`.
pub const GJ_N_FEATURES: usize = 17;

const _: () = assert!(GJ_N_FEATURES == N_FEATURES);

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GjStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Io = 3,
    Parse = 4,
    InvalidInstance = 5,
    DimensionMismatch = 6,
    BufferTooSmall = 7,
    InvalidArgument = 8,
    Panic = 9,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GjSolver {
    Bnb = 0,
    Gls = 1,
    Sa = 2,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GjClock {
    Wall = 0,
    Work = 1,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GjSolveStatus {
    Optimal = 0,
    Satisfied = 1,
    Unresolved = 2,
}

/// Result of one solver run. Objective fields are meaningful only when
/// `has_solution` is non-zero.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GjOutcome {
    pub solver: GjSolver,
    pub status: GjSolveStatus,
    pub has_solution: u8,
    pub makespan: i64,
    pub energy: i64,
    pub tardiness: i64,
    pub scalarized: f64,
    pub solve_time_ms: u64,
    pub budget_ms: u64,
}

/// Opaque instance handle.
pub struct GjInstance(Instance);

/// Opaque trained-model handle.
pub struct GjModel(TrainedModel);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).unwrap_or_default());
}

fn fail(status: GjStatus, msg: impl Into<String>) -> GjStatus {
    set_error(msg);
    status
}

fn from_error(e: Error) -> GjStatus {
    let status = match &e {
        Error::Io { .. } => GjStatus::Io,
        Error::Json(_) | Error::Format { .. } | Error::Csv(_) | Error::SchemaMismatch(_) => GjStatus::Parse,
        Error::InvalidInstance(_) | Error::InfeasibleInput(_) => GjStatus::InvalidInstance,
        Error::DimensionMismatch { .. } => GjStatus::DimensionMismatch,
        _ => GjStatus::InvalidArgument,
    };
    fail(status, e.to_string())
}

fn guard(f: impl FnOnce() -> GjStatus) -> GjStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => {
            if s == GjStatus::Ok {
                set_error("");
            }
            s
        }
        Err(_) => fail(GjStatus::Panic, "internal panic"),
    }
}

unsafe fn str_arg<'a>(p: *const c_char) -> Result<&'a str, GjStatus> {
    if p.is_null() {
        return Err(fail(GjStatus::NullPointer, "null string argument"));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| fail(GjStatus::InvalidUtf8, "string argument is not UTF-8"))
}

fn solver_id(s: GjSolver) -> SolverId {
    match s {
        GjSolver::Bnb => SolverId::ExactBnB,
        GjSolver::Gls => SolverId::GreedyLS,
        GjSolver::Sa => SolverId::Anneal,
    }
}

fn gj_solver(s: SolverId) -> GjSolver {
    match s {
        SolverId::ExactBnB => GjSolver::Bnb,
        SolverId::GreedyLS => GjSolver::Gls,
        SolverId::Anneal => GjSolver::Sa,
    }
}

fn put<T>(out: *mut *mut T, value: T) -> GjStatus {
    if out.is_null() {
        return fail(GjStatus::NullPointer, "null output pointer");
    }
    // SAFETY: checked non-null; the caller owns the slot.
    unsafe { *out = Box::into_raw(Box::new(value)) };
    GjStatus::Ok
}

/// Message of the last failed call on this thread; empty after a success.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn gj_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Parses an instance document. The instance is validated.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gj_instance_from_json(json: *const c_char, out: *mut *mut GjInstance) -> GjStatus {
    guard(|| {
        let text = match str_arg(json) {
            Ok(t) => t,
            Err(s) => return s,
        };
        match Instance::from_json(text) {
            Ok(i) => put(out, GjInstance(i)),
            Err(e) => from_error(e),
        }
    })
}

/// Reads an instance file.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gj_instance_read(path: *const c_char, out: *mut *mut GjInstance) -> GjStatus {
    guard(|| {
        let path = match str_arg(path) {
            Ok(t) => t,
            Err(s) => return s,
        };
        match Instance::read(path) {
            Ok(i) => put(out, GjInstance(i)),
            Err(e) => from_error(e),
        }
    })
}

/// Releases an instance. Null is ignored.
///
/// # Safety
/// `inst` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn gj_instance_free(inst: *mut GjInstance) {
    if !inst.is_null() {
        drop(Box::from_raw(inst));
    }
}

/// # Safety
/// `inst` must be a live handle; the output pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn gj_instance_dims(
    inst: *const GjInstance,
    n_jobs: *mut usize,
    n_machines: *mut usize,
    n_speeds: *mut usize,
) -> GjStatus {
    guard(|| {
        let Some(i) = inst.as_ref() else {
            return fail(GjStatus::NullPointer, "null instance");
        };
        if n_jobs.is_null() || n_machines.is_null() || n_speeds.is_null() {
            return fail(GjStatus::NullPointer, "null output pointer");
        }
        *n_jobs = i.0.n_jobs;
        *n_machines = i.0.n_machines;
        *n_speeds = i.0.n_speeds;
        GjStatus::Ok
    })
}

/// Allocated time budget in milliseconds.
///
/// # Safety
/// `inst` must be a live handle; `out_ms` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gj_budget_ms(inst: *const GjInstance, out_ms: *mut u64) -> GjStatus {
    guard(|| {
        let Some(i) = inst.as_ref() else {
            return fail(GjStatus::NullPointer, "null instance");
        };
        if out_ms.is_null() {
            return fail(GjStatus::NullPointer, "null output pointer");
        }
        *out_ms = allocate_budget(&Characteristics::from(&i.0));
        GjStatus::Ok
    })
}

/// Writes the `GJ_N_FEATURES` features into `out`.
///
/// # Safety
/// `inst` must be a live handle; `out` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn gj_features(inst: *const GjInstance, out: *mut f64, len: usize) -> GjStatus {
    guard(|| {
        let Some(i) = inst.as_ref() else {
            return fail(GjStatus::NullPointer, "null instance");
        };
        if out.is_null() {
            return fail(GjStatus::NullPointer, "null output buffer");
        }
        if len < N_FEATURES {
            return fail(GjStatus::BufferTooSmall, format!("need {N_FEATURES} slots, got {len}"));
        }
        match extract_features(&i.0) {
            Ok(f) => {
                ptr::copy_nonoverlapping(f.to_array().as_ptr(), out, N_FEATURES);
                GjStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// Runs one solver under a budget of `budget_ms`.
///
/// # Safety
/// `inst` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gj_solve(
    inst: *const GjInstance,
    solver: GjSolver,
    budget_ms: u64,
    clock: GjClock,
    seed: u64,
    out: *mut GjOutcome,
) -> GjStatus {
    guard(|| {
        let Some(i) = inst.as_ref() else {
            return fail(GjStatus::NullPointer, "null instance");
        };
        if out.is_null() {
            return fail(GjStatus::NullPointer, "null output pointer");
        }
        let clock = match clock {
            GjClock::Wall => ClockMode::Wall,
            GjClock::Work => ClockMode::Work,
        };
        let o = match solve(solver_id(solver), &i.0, Budget { ms: budget_ms, clock }, seed) {
            Ok(o) => o,
            Err(e) => return from_error(e),
        };
        let b = o.objective;
        *out = GjOutcome {
            solver: gj_solver(o.solver),
            status: match o.status {
                SolveStatus::Optimal => GjSolveStatus::Optimal,
                SolveStatus::Satisfied => GjSolveStatus::Satisfied,
                SolveStatus::Unresolved => GjSolveStatus::Unresolved,
            },
            has_solution: u8::from(b.is_some()),
            makespan: b.map_or(0, |b| b.makespan),
            energy: b.map_or(0, |b| b.energy),
            tardiness: b.map_or(0, |b| b.tardiness),
            scalarized: b.map_or(f64::NAN, |b| b.scalarized),
            solve_time_ms: o.solve_time_ms,
            budget_ms: o.budget_ms,
        };
        GjStatus::Ok
    })
}

/// Reads a trained model file.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gj_model_read(path: *const c_char, out: *mut *mut GjModel) -> GjStatus {
    guard(|| {
        let path = match str_arg(path) {
            Ok(t) => t,
            Err(s) => return s,
        };
        match TrainedModel::read(path) {
            Ok(m) => put(out, GjModel(m)),
            Err(e) => from_error(e),
        }
    })
}

/// Parses a trained model document.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gj_model_from_json(json: *const c_char, out: *mut *mut GjModel) -> GjStatus {
    guard(|| {
        let text = match str_arg(json) {
            Ok(t) => t,
            Err(s) => return s,
        };
        match TrainedModel::from_json(text) {
            Ok(m) => put(out, GjModel(m)),
            Err(e) => from_error(e),
        }
    })
}

/// Releases a model. Null is ignored.
///
/// # Safety
/// `model` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn gj_model_free(model: *mut GjModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Predicts the solver for a raw feature vector of length `len`.
///
/// # Safety
/// `model` must be a live handle; `features` must hold `len` doubles;
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gj_model_predict(
    model: *const GjModel,
    features: *const f64,
    len: usize,
    out: *mut GjSolver,
) -> GjStatus {
    guard(|| {
        let Some(m) = model.as_ref() else {
            return fail(GjStatus::NullPointer, "null model");
        };
        if features.is_null() || out.is_null() {
            return fail(GjStatus::NullPointer, "null pointer argument");
        }
        let x = std::slice::from_raw_parts(features, len);
        match m.0.predict(x) {
            Ok(s) => {
                *out = gj_solver(s);
                GjStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// Extracts the instance features and predicts a solver.
///
/// # Safety
/// Both handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gj_select(model: *const GjModel, inst: *const GjInstance, out: *mut GjSolver) -> GjStatus {
    guard(|| {
        let (Some(m), Some(i)) = (model.as_ref(), inst.as_ref()) else {
            return fail(GjStatus::NullPointer, "null handle");
        };
        if out.is_null() {
            return fail(GjStatus::NullPointer, "null output pointer");
        }
        match select_and_solve(&m.0, &i.0, None, false, 0) {
            Ok(s) => {
                *out = gj_solver(s.solver);
                GjStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}
