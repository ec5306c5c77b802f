use std::path::Path;
use std::process::{Command, Output};

use cascade_phase::scenario::csv::HEADER;

fn cli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cascade-phase"))
        .args(args)
        .output()
        .expect("spawn cascade-phase")
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn meta(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn list_presets() {
    let o = cli(&["list-presets"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    for name in ["fig1a", "fig2b", "fig3a", "fig4c", "fig5b"] {
        assert!(text.contains(name));
    }
}

#[test]
fn run_both_writes_three_series_and_metadata() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run.csv");
    let o = cli(&["run", "--theta", "pi/4", "--steps", "50", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    for suffix in ["analytic", "numeric"] {
        let text = std::fs::read_to_string(dir.path().join(format!("run.{suffix}.csv"))).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), HEADER);
        assert_eq!(lines.count(), 50);
    }
    let dev = std::fs::read_to_string(dir.path().join("run.deviation.csv")).unwrap();
    assert!(dev.starts_with("tau,dx,dy,abs_dev\n"));
    let m = meta(&dir.path().join("run.csv.meta.json"));
    assert_eq!(m["engine"], "both");
    assert_eq!(m["truncation"]["n_max"], 68);
    assert_eq!(m["parameters"]["n_steps"], 50);
    assert!((m["parameters"]["theta"].as_f64().unwrap() - std::f64::consts::FRAC_PI_4).abs() < 1e-15);
    assert!(m["deviation"]["max_abs"].as_f64().unwrap() < 1e-9);
    assert!(m["integrator"]["dt"].as_f64().unwrap() <= 0.002);
    assert!(m["wall_time_seconds"].as_f64().unwrap() >= 0.0);
}

#[test]
fn detuned_run_defaults_to_numeric() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("d.csv");
    let o = cli(&["run", "--delta", "20", "--tau-max", "2", "--steps", "20", "--out", out.to_str().unwrap(), "--emit-unwrapped"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().next().unwrap(), format!("{HEADER},phi_pancharatnam_unwrapped"));
    assert_eq!(meta(&dir.path().join("d.csv.meta.json"))["engine"], "numeric");
}

#[test]
fn config_file_with_cli_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    std::fs::write(&cfg, r#"{"alpha": 2.0, "r": 1.0, "theta": "pi/3", "motion": "neglected", "steps": 30, "engine": "numeric"}"#).unwrap();
    let out = dir.path().join("o.csv");
    let o = cli(&["run", "--config", cfg.to_str().unwrap(), "--alpha", "3", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let m = meta(&dir.path().join("o.csv.meta.json"));
    assert_eq!(m["parameters"]["field"]["alpha"], 3.0);
    assert_eq!(m["parameters"]["field"]["r"], 1.0);
    assert_eq!(m["parameters"]["motion"], "neglected");
    assert_eq!(std::fs::read_to_string(&out).unwrap().lines().count(), 31);
}

#[test]
fn config_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.csv");
    let out = out.to_str().unwrap();
    // closed form needs resonance
    assert_eq!(code(&cli(&["run", "--engine", "analytic", "--delta", "1", "--out", out])), 2);
    // zero state
    assert_eq!(code(&cli(&["run", "--alpha", "0", "--r", "-1", "--out", out])), 2);
    assert_eq!(code(&cli(&["run", "--p", "0", "--out", out])), 2);
    assert_eq!(code(&cli(&["run", "--theta", "half", "--out", out])), 2);
    assert_eq!(code(&cli(&["run", "--bogus"])), 2);
    assert_eq!(code(&cli(&["preset", "fig9"])), 2);
    assert_eq!(code(&cli(&["compare", "--delta", "20"])), 2);
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"alpah": 1}"#).unwrap();
    assert_eq!(code(&cli(&["run", "--config", bad.to_str().unwrap()])), 2);
    assert_eq!(code(&cli(&["run", "--config", "/nonexistent/c.json"])), 2);
    assert!(!Path::new(out).exists());
}

#[test]
fn compare_pass_and_tolerance_breach() {
    let o = cli(&["compare", "--theta", "pi/4", "--tau-max", "6", "--steps", "100"]);
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8(o.stdout).unwrap().starts_with("max_abs="));
    let o = cli(&["compare", "--theta", "pi/4", "--tau-max", "6", "--steps", "100", "--tolerance", "1e-30"]);
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8(o.stderr).unwrap().contains("tolerance"));
}

#[test]
fn invalid_step_exits_2() {
    let o = cli(&["run", "--delta", "20", "--dt", "-1", "--out", "/dev/null"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn preset_writes_into_directory() {
    let dir = tempfile::tempdir().unwrap();
    let o = cli(&["preset", "fig3a", "--steps", "40", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    for label in ["theta0", "theta_pi4"] {
        for e in ["analytic", "numeric", "deviation"] {
            assert!(dir.path().join(format!("fig3a_{label}.{e}.csv")).exists());
        }
        let m = meta(&dir.path().join(format!("fig3a_{label}.csv.meta.json")));
        assert_eq!(m["preset"], "fig3a");
    }
}

#[test]
fn repeated_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for p in [&a, &b] {
        let o = cli(&["run", "--delta", "20", "--theta", "pi/4", "--r", "1", "--steps", "100", "--tau-max", "5", "--out", p.to_str().unwrap()]);
        assert_eq!(code(&o), 0);
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}
