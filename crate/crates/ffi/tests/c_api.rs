use std::ffi::{CStr, CString};
use std::f64::consts::FRAC_PI_4;
use std::path::Path;
use std::process::Command;
use std::ptr;

use cascade_phase_ffi::*;

fn last_error() -> String {
    let p = cp_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn small_config() -> *mut CpConfig {
    let cfg = cp_config_new();
    unsafe {
        assert_eq!(cp_config_set_theta(cfg, FRAC_PI_4), CpStatus::Ok);
        assert_eq!(cp_config_set_grid(cfg, 6.0, 61), CpStatus::Ok);
    }
    cfg
}

fn column(s: *const CpSeries, c: CpColumn) -> Vec<f64> {
    let n = unsafe { cp_series_len(s) };
    let mut v = vec![0.0; n];
    assert_eq!(unsafe { cp_series_column(s, c, v.as_mut_ptr(), n) }, CpStatus::Ok);
    v
}

#[test]
fn run_both_engines_and_read_columns() {
    let cfg = small_config();
    let mut a = ptr::null_mut();
    let mut n = ptr::null_mut();
    unsafe {
        assert_eq!(cp_run(cfg, CpEngine::Analytic, &mut a), CpStatus::Ok);
        assert_eq!(cp_run(cfg, CpEngine::Numeric, &mut n), CpStatus::Ok);
        assert_eq!(cp_series_len(a), 61);
        assert_eq!(cp_series_len(n), 61);
    }
    let (xa, xn) = (column(a, CpColumn::X), column(n, CpColumn::X));
    let (ya, yn) = (column(a, CpColumn::Y), column(n, CpColumn::Y));
    for k in 0..61 {
        assert!((xa[k] - xn[k]).hypot(ya[k] - yn[k]) < 1e-9);
    }
    let tau = column(a, CpColumn::Tau);
    assert_eq!(tau[0], 0.0);
    assert!((tau[60] - 6.0).abs() < 1e-15);
    // populations only come from the numerical engine
    assert!(column(a, CpColumn::Rho11).iter().all(|v| v.is_nan()));
    let p1 = column(n, CpColumn::Rho11);
    let p2 = column(n, CpColumn::Rho22);
    let p3 = column(n, CpColumn::Rho33);
    for k in 0..61 {
        assert!((p1[k] + p2[k] + p3[k] - 1.0).abs() < 1e-9);
    }
    unsafe {
        cp_series_free(a);
        cp_series_free(n);
        cp_config_free(cfg);
    }
}

#[test]
fn compare_reports_deviation() {
    let cfg = small_config();
    let mut dev = -1.0;
    unsafe {
        assert_eq!(cp_compare(cfg, 1e-6, &mut dev), CpStatus::Ok);
        assert!((0.0..1e-9).contains(&dev));
        assert_eq!(cp_compare(cfg, 1e-30, &mut dev), CpStatus::Numerical);
        assert!(dev > 0.0);
        assert!(last_error().contains("tolerance"));
        cp_config_free(cfg);
    }
}

#[test]
fn error_codes() {
    let cfg = small_config();
    let mut s = ptr::null_mut();
    unsafe {
        assert_eq!(cp_config_set_alpha(ptr::null_mut(), 1.0), CpStatus::NullPointer);
        assert_eq!(cp_config_set_alpha(cfg, f64::NAN), CpStatus::InvalidArgument);
        assert!(last_error().contains("alpha"));

        // analytic engine refuses detuning
        assert_eq!(cp_config_set_delta(cfg, 20.0), CpStatus::Ok);
        assert_eq!(cp_run(cfg, CpEngine::Analytic, &mut s), CpStatus::Config);
        assert!(s.is_null());
        assert_eq!(cp_config_set_delta(cfg, 0.0), CpStatus::Ok);

        // alpha = 0 with r = -1 is the zero vector
        assert_eq!(cp_config_set_alpha(cfg, 0.0), CpStatus::Ok);
        assert_eq!(cp_config_set_r(cfg, -1.0), CpStatus::Ok);
        assert_eq!(cp_config_validate(cfg), CpStatus::InvalidArgument);
        assert_eq!(cp_config_set_alpha(cfg, 2.0), CpStatus::Ok);
        assert_eq!(cp_config_validate(cfg), CpStatus::Ok);
        assert!(cp_last_error_message().is_null());

        assert_eq!(cp_config_set_moving(cfg, 0), CpStatus::Ok);
        assert_eq!(cp_config_validate(cfg), CpStatus::InvalidArgument);
        assert_eq!(cp_config_set_neglected(cfg), CpStatus::Ok);
        assert_eq!(cp_config_validate(cfg), CpStatus::Ok);

        assert_eq!(cp_run(cfg, CpEngine::Numeric, ptr::null_mut()), CpStatus::NullPointer);
        assert_eq!(cp_run(cfg, CpEngine::Numeric, &mut s), CpStatus::Ok);
        let mut short = [0.0; 3];
        assert_eq!(
            cp_series_column(s, CpColumn::X, short.as_mut_ptr(), short.len()),
            CpStatus::InvalidArgument
        );
        assert_eq!(cp_series_len(ptr::null()), 0);
        cp_series_free(s);
        cp_series_free(ptr::null_mut());
        cp_config_free(cfg);
        cp_config_free(ptr::null_mut());
    }
}

#[test]
fn csv_export() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("series.csv");
    let cpath = CString::new(path.to_str().unwrap()).unwrap();
    let cfg = small_config();
    let mut s = ptr::null_mut();
    unsafe {
        assert_eq!(cp_run(cfg, CpEngine::Numeric, &mut s), CpStatus::Ok);
        assert_eq!(cp_series_write_csv(s, cpath.as_ptr(), true), CpStatus::Ok);
        let bad = CString::new(dir.path().join("missing/x.csv").to_str().unwrap()).unwrap();
        assert_eq!(cp_series_write_csv(s, bad.as_ptr(), false), CpStatus::Io);
        cp_series_free(s);
        cp_config_free(cfg);
    }
    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("tau,x,y,phi_pancharatnam"));
    assert_eq!(lines.count(), 61);
}

#[test]
fn version_string() {
    let v = unsafe { CStr::from_ptr(cp_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

const EXPORTS: &[&str] = &[
    "cp_version",
    "cp_last_error_message",
    "cp_config_new",
    "cp_config_free",
    "cp_config_set_alpha",
    "cp_config_set_r",
    "cp_config_set_theta",
    "cp_config_set_delta",
    "cp_config_set_epsilon_tail",
    "cp_config_set_dt",
    "cp_config_set_moving",
    "cp_config_set_neglected",
    "cp_config_set_grid",
    "cp_config_set_n_max",
    "cp_config_validate",
    "cp_run",
    "cp_compare",
    "cp_series_free",
    "cp_series_len",
    "cp_series_column",
    "cp_series_write_csv",
];

fn header_path() -> std::path::PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("include/cascade_phase.h")
}

#[test]
fn header_declares_every_export() {
    let header = std::fs::read_to_string(header_path()).unwrap();
    for name in EXPORTS {
        assert!(header.contains(&format!("{name}(")), "{name} missing from header");
    }
    for ty in ["typedef struct CpConfig CpConfig;", "typedef struct CpSeries CpSeries;", "CP_STATUS_OK = 0"] {
        assert!(header.contains(ty), "{ty}");
    }
}

#[test]
fn header_compiles_as_c() {
    // Skipped where no C compiler is installed.
    let Ok(status) = Command::new("cc")
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-x", "c"])
        .arg(header_path())
        .status()
    else {
        eprintln!("cc not found; skipping");
        return;
    };
    assert!(status.success());
}
