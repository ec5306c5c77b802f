//! C interface to `cascade_phase`.
//!
//! Configurations and result series are opaque heap handles owned by the
//! caller and released with the matching `*_free`. Every fallible call
//! returns a [`CpStatus`]; the message of the last failure on the calling
//! thread is available from [`cp_last_error_message`].

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::fs::File;
use std::io::{BufWriter, Write};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use cascade_phase::field::{self, FieldSpec};
use cascade_phase::observables::{PhaseRecord, PhaseTimeSeries};
use cascade_phase::scenario::{self, csv, Engine, ScenarioConfig};
use cascade_phase::{evolver, observables, system, Error, Motion, SystemConfig};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CpStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Config = 3,
    Numerical = 4,
    Io = 5,
    Panic = 6,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CpEngine {
    Analytic = 0,
    Numeric = 1,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CpColumn {
    Tau = 0,
    X = 1,
    Y = 2,
    PhiPancharatnam = 3,
    PhiDynamical = 4,
    PhiGeometric = 5,
    PhiEq5 = 6,
    Rho11 = 7,
    Rho22 = 8,
    Rho33 = 9,
    NormError = 10,
}

/// Opaque scenario configuration.
pub struct CpConfig {
    system: SystemConfig,
}

/// Opaque phase time series.
pub struct CpSeries {
    series: PhaseTimeSeries,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn status_of(err: &Error) -> CpStatus {
    match err {
        Error::InvalidParameter(_) | Error::ZeroState { .. } => CpStatus::InvalidArgument,
        Error::Io(_) => CpStatus::Io,
        e if e.is_numerical() => CpStatus::Numerical,
        _ => CpStatus::Config,
    }
}

/// Run `f`, recording the error message and mapping panics.
fn guard(f: impl FnOnce() -> Result<(), (CpStatus, String)>) -> CpStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => CpStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            CpStatus::Panic
        }
    }
}

fn lib<T>(r: cascade_phase::Result<T>) -> Result<T, (CpStatus, String)> {
    r.map_err(|e| (status_of(&e), e.to_string()))
}

fn null(what: &str) -> (CpStatus, String) {
    (CpStatus::NullPointer, format!("{what} is null"))
}

unsafe fn config_mut<'a>(cfg: *mut CpConfig) -> Result<&'a mut CpConfig, (CpStatus, String)> {
    cfg.as_mut().ok_or_else(|| null("config"))
}

unsafe fn config_ref<'a>(cfg: *const CpConfig) -> Result<&'a CpConfig, (CpStatus, String)> {
    cfg.as_ref().ok_or_else(|| null("config"))
}

unsafe fn series_ref<'a>(s: *const CpSeries) -> Result<&'a CpSeries, (CpStatus, String)> {
    s.as_ref().ok_or_else(|| null("series"))
}

fn finite(name: &str, v: f64) -> Result<(), (CpStatus, String)> {
    if v.is_finite() {
        Ok(())
    } else {
        Err((CpStatus::InvalidArgument, format!("{name} must be finite")))
    }
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn cp_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failed call on this thread, or null. Valid until
/// the next call into the library from the same thread.
#[no_mangle]
pub extern "C" fn cp_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// New configuration: `alpha = 5, r = 0, theta = 0, delta = 0`, moving atom
/// with `p = 1`, `tau` in `[0, 8 pi]` at 2000 points.
#[no_mangle]
pub extern "C" fn cp_config_new() -> *mut CpConfig {
    let system = SystemConfig::new(FieldSpec::new(5.0, 0.0), 0.0, 0.0, Motion::Moving { p: 1 });
    Box::into_raw(Box::new(CpConfig { system }))
}

#[no_mangle]
pub unsafe extern "C" fn cp_config_free(cfg: *mut CpConfig) {
    if !cfg.is_null() {
        drop(Box::from_raw(cfg));
    }
}

unsafe fn set_scalar(cfg: *mut CpConfig, name: &str, value: f64, apply: impl FnOnce(&mut SystemConfig, f64)) -> CpStatus {
    guard(|| {
        let c = config_mut(cfg)?;
        finite(name, value)?;
        apply(&mut c.system, value);
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn cp_config_set_alpha(cfg: *mut CpConfig, alpha: f64) -> CpStatus {
    set_scalar(cfg, "alpha", alpha, |s, v| s.field.alpha = v)
}

#[no_mangle]
pub unsafe extern "C" fn cp_config_set_r(cfg: *mut CpConfig, r: f64) -> CpStatus {
    set_scalar(cfg, "r", r, |s, v| s.field.r = v)
}

/// Atomic superposition angle in radians.
#[no_mangle]
pub unsafe extern "C" fn cp_config_set_theta(cfg: *mut CpConfig, theta: f64) -> CpStatus {
    set_scalar(cfg, "theta", theta, |s, v| s.theta = v)
}

#[no_mangle]
pub unsafe extern "C" fn cp_config_set_delta(cfg: *mut CpConfig, delta: f64) -> CpStatus {
    set_scalar(cfg, "delta", delta, |s, v| s.delta = v)
}

#[no_mangle]
pub unsafe extern "C" fn cp_config_set_epsilon_tail(cfg: *mut CpConfig, epsilon_tail: f64) -> CpStatus {
    set_scalar(cfg, "epsilon_tail", epsilon_tail, |s, v| s.field.epsilon_tail = v)
}

/// Internal integration step; zero or negative restores the default.
#[no_mangle]
pub unsafe extern "C" fn cp_config_set_dt(cfg: *mut CpConfig, dt: f64) -> CpStatus {
    set_scalar(cfg, "dt", dt, |s, v| s.dt_internal = (v > 0.0).then_some(v))
}

/// Moving atom with mode-shape parameter `p`.
#[no_mangle]
pub unsafe extern "C" fn cp_config_set_moving(cfg: *mut CpConfig, p: u32) -> CpStatus {
    guard(|| {
        config_mut(cfg)?.system.motion = Motion::Moving { p };
        Ok(())
    })
}

/// Atom at rest (unit mode shape).
#[no_mangle]
pub unsafe extern "C" fn cp_config_set_neglected(cfg: *mut CpConfig) -> CpStatus {
    guard(|| {
        config_mut(cfg)?.system.motion = Motion::Neglected;
        Ok(())
    })
}

/// Output grid of `steps` points over `[0, tau_max]`.
#[no_mangle]
pub unsafe extern "C" fn cp_config_set_grid(cfg: *mut CpConfig, tau_max: f64, steps: usize) -> CpStatus {
    guard(|| {
        let c = config_mut(cfg)?;
        finite("tau_max", tau_max)?;
        c.system.tau_max = tau_max;
        c.system.n_steps = steps;
        Ok(())
    })
}

/// Fix the photon cutoff; zero restores the automatic choice.
#[no_mangle]
pub unsafe extern "C" fn cp_config_set_n_max(cfg: *mut CpConfig, n_max: usize) -> CpStatus {
    guard(|| {
        config_mut(cfg)?.system.field.cutoff = (n_max > 0).then_some(n_max);
        Ok(())
    })
}

/// Check the configuration without running anything.
#[no_mangle]
pub unsafe extern "C" fn cp_config_validate(cfg: *const CpConfig) -> CpStatus {
    guard(|| {
        let c = config_ref(cfg)?;
        lib(c.system.validate())?;
        lib(field::superposed_distribution(&c.system.field).map(|_| ()))
    })
}

fn run_engine(system: &SystemConfig, engine: CpEngine) -> cascade_phase::Result<PhaseTimeSeries> {
    system.validate()?;
    let dist = field::superposed_distribution(&system.field)?;
    match engine {
        CpEngine::Analytic => observables::series_from_analytic(system, &dist),
        CpEngine::Numeric => {
            let psi0 = system::initial_state(system, &dist);
            let traj = evolver::evolve(&psi0, system)?;
            observables::series_from_trajectory(&traj)
        }
    }
}

/// Run one engine and store the resulting series in `*out`.
#[no_mangle]
pub unsafe extern "C" fn cp_run(cfg: *const CpConfig, engine: CpEngine, out: *mut *mut CpSeries) -> CpStatus {
    guard(|| {
        let c = config_ref(cfg)?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        let series = lib(run_engine(&c.system, engine))?;
        *out = Box::into_raw(Box::new(CpSeries { series }));
        Ok(())
    })
}

/// Largest `|z_numeric - z_analytic|` over the grid, written to
/// `*max_abs`. Returns `CP_STATUS_NUMERICAL` (with `*max_abs` still set)
/// if it exceeds `tolerance`.
#[no_mangle]
pub unsafe extern "C" fn cp_compare(cfg: *const CpConfig, tolerance: f64, max_abs: *mut f64) -> CpStatus {
    guard(|| {
        let c = config_ref(cfg)?;
        if max_abs.is_null() {
            return Err(null("max_abs"));
        }
        let mut sc = ScenarioConfig::new(c.system, Engine::Both);
        sc.tolerance = tolerance;
        lib(sc.validate())?;
        let run = lib(scenario::run_scenario(&sc))?;
        let dev = run.deviation.expect("both engines ran");
        *max_abs = dev.max_abs;
        if dev.max_abs > tolerance {
            return Err((
                CpStatus::Numerical,
                Error::ToleranceExceeded { deviation: dev.max_abs, tolerance }.to_string(),
            ));
        }
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn cp_series_free(series: *mut CpSeries) {
    if !series.is_null() {
        drop(Box::from_raw(series));
    }
}

/// Number of grid points; zero for a null handle.
#[no_mangle]
pub unsafe extern "C" fn cp_series_len(series: *const CpSeries) -> usize {
    series.as_ref().map_or(0, |s| s.series.len())
}

fn column_value(r: &PhaseRecord, col: CpColumn) -> f64 {
    let pop = |i: usize| r.populations.map(|p| p[i]);
    let v = match col {
        CpColumn::Tau => Some(r.tau),
        CpColumn::X => Some(r.x),
        CpColumn::Y => Some(r.y),
        CpColumn::PhiPancharatnam => r.phi_pancharatnam,
        CpColumn::PhiDynamical => r.phi_dynamical,
        CpColumn::PhiGeometric => r.phi_geometric,
        CpColumn::PhiEq5 => r.phi_eq5,
        CpColumn::Rho11 => pop(0),
        CpColumn::Rho22 => pop(1),
        CpColumn::Rho33 => pop(2),
        CpColumn::NormError => r.norm_error,
    };
    v.unwrap_or(f64::NAN)
}

/// Copy one column into `buf` of length `len`, which must equal
/// `cp_series_len`. Undefined entries (phase gaps, populations of the
/// closed-form engine) are NaN.
#[no_mangle]
pub unsafe extern "C" fn cp_series_column(
    series: *const CpSeries,
    column: CpColumn,
    buf: *mut f64,
    len: usize,
) -> CpStatus {
    guard(|| {
        let s = series_ref(series)?;
        if buf.is_null() {
            return Err(null("buf"));
        }
        if len != s.series.len() {
            return Err((
                CpStatus::InvalidArgument,
                format!("buffer holds {len} values, series has {}", s.series.len()),
            ));
        }
        let out = std::slice::from_raw_parts_mut(buf, len);
        for (o, r) in out.iter_mut().zip(&s.series.records) {
            *o = column_value(r, column);
        }
        Ok(())
    })
}

/// Write the series as CSV to the UTF-8 path `path`.
#[no_mangle]
pub unsafe extern "C" fn cp_series_write_csv(series: *const CpSeries, path: *const c_char, emit_unwrapped: bool) -> CpStatus {
    guard(|| {
        let s = series_ref(series)?;
        if path.is_null() {
            return Err(null("path"));
        }
        let path = CStr::from_ptr(path)
            .to_str()
            .map_err(|_| (CpStatus::InvalidArgument, "path is not UTF-8".to_string()))?;
        let io = |e: std::io::Error| (CpStatus::Io, format!("{path}: {e}"));
        let mut w = BufWriter::new(File::create(path).map_err(io)?);
        csv::write_series(&mut w, &s.series, emit_unwrapped).map_err(io)?;
        w.flush().map_err(io)
    })
}
