//! C ABI for `locillusion`.
//!
//! Scenarios and trajectories are opaque heap handles owned by the caller
//! and released with the matching `*_free` function. Every fallible call
//! returns an [`LiStatus`]; on failure a description is available from
//! [`li_last_error_message`] on the same thread until the next failing call.
//! The header `include/locillusion.h` is generated from this file at build time.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::ptr;

use locillusion::report::write_csv;
use locillusion::sim::TerminationReason;
use locillusion::{
    build_system, default_scenario, lqr_gain, run_closed_loop, synthesize_intensities, trilaterate,
    validate_scenario, Error, IState, Observation, Point2, ProducerMode, Scenario, TowerArray, TrajectoryLog,
};

/// Opaque scenario handle.
pub struct LiScenario(Scenario);

/// Opaque trajectory handle.
pub struct LiTrajectory(TrajectoryLog);

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LiStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidScenario = 3,
    SolverFailure = 4,
    Io = 5,
    OutOfRange = 6,
    /// The readings have no consistent position.
    Implausible = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LiProducerMode {
    Lqr = 0,
    Mpc = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LiTermination {
    GoalReached = 0,
    ImplausibleIState = 1,
    MaxStages = 2,
}

/// One logged stage. `iota` and `e` are meaningful only when `plausible`.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct LiStageRecord {
    pub stage: usize,
    pub omega_r: [f64; 2],
    pub iota: [f64; 2],
    pub e: [f64; 2],
    pub u_r: [f64; 2],
    pub u_p: [f64; 2],
    pub intensities: [f64; 3],
    pub observation: [f64; 3],
    pub plausible: bool,
    pub illusion: bool,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn fail(status: LiStatus, message: impl ToString) -> LiStatus {
    let msg = CString::new(message.to_string().replace('\0', " ")).expect("interior NULs removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
    status
}

fn solver_status(err: &Error) -> LiStatus {
    match err {
        Error::Scenario(_) => LiStatus::InvalidScenario,
        _ => LiStatus::SolverFailure,
    }
}

unsafe fn read_str<'a>(s: *const c_char) -> Result<&'a str, LiStatus> {
    if s.is_null() {
        return Err(fail(LiStatus::NullPointer, "null string"));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|e| fail(LiStatus::InvalidUtf8, e))
}

/// Message for the most recent failure on this thread, or NULL. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn li_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// The built-in two-experiment scenario (LQR producer).
#[no_mangle]
pub extern "C" fn li_scenario_default() -> *mut LiScenario {
    Box::into_raw(Box::new(LiScenario(default_scenario())))
}

/// Parses a scenario from JSON text. Validation happens in [`li_run`] and
/// [`li_scenario_validate`].
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn li_scenario_from_json(json: *const c_char, out: *mut *mut LiScenario) -> LiStatus {
    if out.is_null() {
        return fail(LiStatus::NullPointer, "null output pointer");
    }
    let text = match read_str(json) {
        Ok(t) => t,
        Err(s) => return s,
    };
    match Scenario::from_json(text) {
        Ok(s) => {
            *out = Box::into_raw(Box::new(LiScenario(s)));
            LiStatus::Ok
        }
        Err(e) => fail(LiStatus::InvalidScenario, e),
    }
}

/// JSON form of a scenario; release with [`li_string_free`]. NULL on a null
/// handle.
///
/// # Safety
/// `scenario` must be a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn li_scenario_to_json(scenario: *const LiScenario) -> *mut c_char {
    let Some(s) = scenario.as_ref() else {
        fail(LiStatus::NullPointer, "null scenario");
        return ptr::null_mut();
    };
    CString::new(s.0.to_json()).map_or(ptr::null_mut(), CString::into_raw)
}

/// Switches the producer mode; an implicit receiver variant follows it.
///
/// # Safety
/// `scenario` must be a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn li_scenario_set_mode(scenario: *mut LiScenario, mode: LiProducerMode) -> LiStatus {
    let Some(s) = scenario.as_mut() else {
        return fail(LiStatus::NullPointer, "null scenario");
    };
    let mode = match mode {
        LiProducerMode::Lqr => ProducerMode::Lqr,
        LiProducerMode::Mpc => ProducerMode::Mpc,
    };
    s.0 = s.0.clone().with_mode(mode);
    LiStatus::Ok
}

/// # Safety
/// `scenario` must be a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn li_scenario_validate(scenario: *const LiScenario) -> LiStatus {
    let Some(s) = scenario.as_ref() else {
        return fail(LiStatus::NullPointer, "null scenario");
    };
    match validate_scenario(s.0.clone()) {
        Ok(_) => LiStatus::Ok,
        Err(e) => fail(LiStatus::InvalidScenario, e),
    }
}

/// # Safety
/// `scenario` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn li_scenario_free(scenario: *mut LiScenario) {
    if !scenario.is_null() {
        drop(Box::from_raw(scenario));
    }
}

/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn li_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// LQR producer gain, row-major 2×4 into `out_gain`, and the Riccati
/// residual into `out_residual` (may be NULL).
///
/// # Safety
/// `out_gain` must point to 8 writable doubles.
#[no_mangle]
pub unsafe extern "C" fn li_lqr_gain(
    scenario: *const LiScenario,
    out_gain: *mut f64,
    out_residual: *mut f64,
) -> LiStatus {
    let Some(s) = scenario.as_ref() else {
        return fail(LiStatus::NullPointer, "null scenario");
    };
    if out_gain.is_null() {
        return fail(LiStatus::NullPointer, "null gain buffer");
    }
    let valid = match validate_scenario(s.0.clone()) {
        Ok(v) => v,
        Err(e) => return fail(LiStatus::InvalidScenario, e),
    };
    let sol = match build_system(valid.receiver.gain).and_then(|sys| lqr_gain(&sys, &valid.producer.q, &valid.producer.r)) {
        Ok(sol) => sol,
        Err(e) => return fail(solver_status(&e), e),
    };
    let out = std::slice::from_raw_parts_mut(out_gain, 8);
    out.copy_from_slice(sol.gain.as_slice());
    if !out_residual.is_null() {
        *out_residual = sol.residual;
    }
    LiStatus::Ok
}

/// Validates and runs a scenario. On success `*out` receives a trajectory
/// handle, also when the run ends with an implausible estimate (check
/// [`li_trajectory_termination`]).
///
/// # Safety
/// `scenario` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn li_run(scenario: *const LiScenario, out: *mut *mut LiTrajectory) -> LiStatus {
    let Some(s) = scenario.as_ref() else {
        return fail(LiStatus::NullPointer, "null scenario");
    };
    if out.is_null() {
        return fail(LiStatus::NullPointer, "null output pointer");
    }
    let valid = match validate_scenario(s.0.clone()) {
        Ok(v) => v,
        Err(e) => return fail(LiStatus::InvalidScenario, e),
    };
    match run_closed_loop(&valid) {
        Ok(log) => {
            *out = Box::into_raw(Box::new(LiTrajectory(log)));
            LiStatus::Ok
        }
        Err(e) => fail(solver_status(&e), e),
    }
}

/// Number of logged stages; 0 for NULL.
///
/// # Safety
/// `traj` must be a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn li_trajectory_len(traj: *const LiTrajectory) -> usize {
    traj.as_ref().map_or(0, |t| t.0.records.len())
}

/// Stage at which the run stopped; 0 for NULL.
///
/// # Safety
/// `traj` must be a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn li_trajectory_terminated_at(traj: *const LiTrajectory) -> usize {
    traj.as_ref().map_or(0, |t| t.0.terminated_at)
}

/// # Safety
/// `traj` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn li_trajectory_termination(traj: *const LiTrajectory, out: *mut LiTermination) -> LiStatus {
    let (Some(t), false) = (traj.as_ref(), out.is_null()) else {
        return fail(LiStatus::NullPointer, "null argument");
    };
    *out = match t.0.termination_reason {
        TerminationReason::GoalReached => LiTermination::GoalReached,
        TerminationReason::ImplausibleIState => LiTermination::ImplausibleIState,
        TerminationReason::MaxStages => LiTermination::MaxStages,
    };
    LiStatus::Ok
}

/// Copies the stage at zero-based `index` into `out`.
///
/// # Safety
/// `traj` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn li_trajectory_stage(
    traj: *const LiTrajectory,
    index: usize,
    out: *mut LiStageRecord,
) -> LiStatus {
    let (Some(t), false) = (traj.as_ref(), out.is_null()) else {
        return fail(LiStatus::NullPointer, "null argument");
    };
    let Some(r) = t.0.records.get(index) else {
        return fail(
            LiStatus::OutOfRange,
            format!("stage index {index} out of range (len {})", t.0.records.len()),
        );
    };
    let zero = Point2::ORIGIN;
    *out = LiStageRecord {
        stage: r.stage,
        omega_r: r.omega_r.to_array(),
        iota: r.iota.point().unwrap_or(zero).to_array(),
        e: r.e.unwrap_or(zero).to_array(),
        u_r: r.u_r.to_array(),
        u_p: r.u_p.to_array(),
        intensities: r.intensities,
        observation: r.observation,
        plausible: r.plausible,
        illusion: r.illusion,
    };
    LiStatus::Ok
}

/// Writes the trajectory CSV to `path`.
///
/// # Safety
/// `traj` must be a live handle and `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn li_trajectory_write_csv(traj: *const LiTrajectory, path: *const c_char) -> LiStatus {
    let Some(t) = traj.as_ref() else {
        return fail(LiStatus::NullPointer, "null trajectory");
    };
    let path = match read_str(path) {
        Ok(p) => p,
        Err(s) => return s,
    };
    let file = match std::fs::File::create(path) {
        Ok(f) => f,
        Err(e) => return fail(LiStatus::Io, format!("{path}: {e}")),
    };
    match write_csv(&t.0, std::io::BufWriter::new(file)) {
        Ok(()) => LiStatus::Ok,
        Err(e) => fail(LiStatus::Io, format!("{path}: {e}")),
    }
}

/// # Safety
/// `traj` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn li_trajectory_free(traj: *mut LiTrajectory) {
    if !traj.is_null() {
        drop(Box::from_raw(traj));
    }
}

unsafe fn tower_array(positions: *const f64, calibration: *const f64) -> Result<TowerArray, LiStatus> {
    if positions.is_null() || calibration.is_null() {
        return Err(fail(LiStatus::NullPointer, "null tower data"));
    }
    let p = std::slice::from_raw_parts(positions, 6);
    let c = std::slice::from_raw_parts(calibration, 3);
    Ok(TowerArray::new(
        [Point2::new(p[0], p[1]), Point2::new(p[2], p[3]), Point2::new(p[4], p[5])],
        [c[0], c[1], c[2]],
    ))
}

/// Position consistent with three readings. `tower_positions` holds
/// x1,y1,x2,y2,x3,y3. Returns `Implausible` when no position matches.
///
/// # Safety
/// Pointers must reference 6, 3, 3 and 2 doubles respectively.
#[no_mangle]
pub unsafe extern "C" fn li_trilaterate(
    tower_positions: *const f64,
    calibration: *const f64,
    readings: *const f64,
    out_position: *mut f64,
) -> LiStatus {
    let towers = match tower_array(tower_positions, calibration) {
        Ok(t) => t,
        Err(s) => return s,
    };
    if readings.is_null() || out_position.is_null() {
        return fail(LiStatus::NullPointer, "null readings or output");
    }
    let r = std::slice::from_raw_parts(readings, 3);
    match trilaterate(&towers, &Observation([r[0], r[1], r[2]])) {
        IState::Singleton(p) => {
            std::slice::from_raw_parts_mut(out_position, 2).copy_from_slice(&p.to_array());
            LiStatus::Ok
        }
        IState::Empty => fail(LiStatus::Implausible, "readings have no consistent position"),
    }
}

/// Source intensities that make a receiver at `true_position` perceive
/// itself at `target`.
///
/// # Safety
/// Pointers must reference 6, 3, 2, 2 and 3 doubles respectively.
#[no_mangle]
pub unsafe extern "C" fn li_synthesize_intensities(
    tower_positions: *const f64,
    calibration: *const f64,
    true_position: *const f64,
    target: *const f64,
    out_intensities: *mut f64,
) -> LiStatus {
    let towers = match tower_array(tower_positions, calibration) {
        Ok(t) => t,
        Err(s) => return s,
    };
    if true_position.is_null() || target.is_null() || out_intensities.is_null() {
        return fail(LiStatus::NullPointer, "null position or output");
    }
    let t = std::slice::from_raw_parts(true_position, 2);
    let q = std::slice::from_raw_parts(target, 2);
    let s = synthesize_intensities(&towers, Point2::new(t[0], t[1]), Point2::new(q[0], q[1]));
    std::slice::from_raw_parts_mut(out_intensities, 3).copy_from_slice(&s);
    LiStatus::Ok
}
