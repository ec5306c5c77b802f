//! Scenario runs: configuration resolution, engine dispatch, CSV and
//! metadata output.

pub mod csv;
pub mod presets;

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evolver::{self, Integrator};
use crate::field::{self, FieldSpec, Truncation};
use crate::observables::{self, PhaseTimeSeries};
use crate::system::{self, Motion, SystemConfig};

pub use presets::{find_preset, list_presets, Preset, PresetVariant};

/// Default bound for `compare`.
pub const DEFAULT_TOLERANCE: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Engine {
    Analytic,
    Numeric,
    Both,
}

impl FromStr for Engine {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "analytic" => Ok(Engine::Analytic),
            "numeric" => Ok(Engine::Numeric),
            "both" => Ok(Engine::Both),
            _ => Err(Error::Config(format!("unknown engine '{s}' (analytic|numeric|both)"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MotionKind {
    Moving,
    Neglected,
}

impl FromStr for MotionKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "moving" => Ok(MotionKind::Moving),
            "neglected" => Ok(MotionKind::Neglected),
            _ => Err(Error::Config(format!("unknown motion '{s}' (moving|neglected)"))),
        }
    }
}

/// Parse an angle: a plain number, or a multiple of `pi` such as `pi/4`,
/// `-pi`, `2pi/3` or `2*pi/3`.
pub fn parse_angle(s: &str) -> Result<f64> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect::<String>().to_lowercase();
    if let Ok(v) = t.parse::<f64>() {
        return Ok(v);
    }
    let bad = || Error::Config(format!("cannot parse angle '{s}'"));
    let (num, den) = match t.split_once('/') {
        Some((n, d)) => (n, d.parse::<f64>().map_err(|_| bad())?),
        None => (t.as_str(), 1.0),
    };
    let coef = num.strip_suffix("pi").ok_or_else(bad)?;
    let coef = coef.strip_suffix('*').unwrap_or(coef);
    let k = match coef {
        "" | "+" => 1.0,
        "-" => -1.0,
        c => c.parse::<f64>().map_err(|_| bad())?,
    };
    Ok(k * std::f64::consts::PI / den)
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum AngleValue {
    Number(f64),
    Text(String),
}

impl AngleValue {
    fn resolve(&self) -> Result<f64> {
        match self {
            AngleValue::Number(v) => Ok(*v),
            AngleValue::Text(s) => parse_angle(s),
        }
    }
}

/// Flat settings shared by JSON config files and the command line. Unset
/// fields fall through to the next layer, then to defaults.
#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSettings {
    pub alpha: Option<f64>,
    pub delta: Option<f64>,
    pub theta: Option<AngleValue>,
    pub r: Option<f64>,
    pub p: Option<u32>,
    pub motion: Option<MotionKind>,
    pub tau_max: Option<f64>,
    pub steps: Option<usize>,
    pub dt: Option<f64>,
    pub engine: Option<Engine>,
    pub out: Option<PathBuf>,
    pub emit_unwrapped: Option<bool>,
    pub epsilon_tail: Option<f64>,
    pub n_max: Option<usize>,
    pub g: Option<f64>,
    pub tolerance: Option<f64>,
}

impl ScenarioSettings {
    pub fn from_json_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("reading {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| Error::Config(format!("parsing {}: {e}", path.display())))
    }

    /// `self` with every field set in `over` replaced.
    pub fn overridden_by(self, over: ScenarioSettings) -> Self {
        Self {
            alpha: over.alpha.or(self.alpha),
            delta: over.delta.or(self.delta),
            theta: over.theta.or(self.theta),
            r: over.r.or(self.r),
            p: over.p.or(self.p),
            motion: over.motion.or(self.motion),
            tau_max: over.tau_max.or(self.tau_max),
            steps: over.steps.or(self.steps),
            dt: over.dt.or(self.dt),
            engine: over.engine.or(self.engine),
            out: over.out.or(self.out),
            emit_unwrapped: over.emit_unwrapped.or(self.emit_unwrapped),
            epsilon_tail: over.epsilon_tail.or(self.epsilon_tail),
            n_max: over.n_max.or(self.n_max),
            g: over.g.or(self.g),
            tolerance: over.tolerance.or(self.tolerance),
        }
    }

    /// Apply onto an existing system configuration (used for presets).
    pub fn apply_to(&self, base: &SystemConfig) -> Result<SystemConfig> {
        let mut c = *base;
        if let Some(v) = self.alpha {
            c.field.alpha = v;
        }
        if let Some(v) = self.r {
            c.field.r = v;
        }
        if let Some(v) = self.epsilon_tail {
            c.field.epsilon_tail = v;
        }
        if let Some(v) = self.n_max {
            c.field.cutoff = Some(v);
        }
        if let Some(v) = self.delta {
            c.delta = v;
        }
        if let Some(v) = &self.theta {
            c.theta = v.resolve()?;
        }
        let p = self.p.or(match c.motion {
            Motion::Moving { p } => Some(p),
            Motion::Neglected => None,
        });
        let kind = self.motion.unwrap_or(match c.motion {
            Motion::Moving { .. } => MotionKind::Moving,
            Motion::Neglected => MotionKind::Neglected,
        });
        c.motion = match kind {
            MotionKind::Moving => Motion::Moving { p: p.unwrap_or(1) },
            MotionKind::Neglected => Motion::Neglected,
        };
        if let Some(v) = self.tau_max {
            c.tau_max = v;
        }
        if let Some(v) = self.steps {
            c.n_steps = v;
        }
        if let Some(v) = self.dt {
            c.dt_internal = Some(v);
        }
        if let Some(v) = self.g {
            c.g = v;
        }
        c.validate()?;
        Ok(c)
    }

    /// Resolve into a full scenario with defaults `α = 5, Δ = 0, θ = 0,
    /// r = 0, p = 1` (moving), `τ ∈ [0, 8π]` at 2000 points.
    pub fn resolve(&self) -> Result<ScenarioConfig> {
        let base = SystemConfig::new(FieldSpec::new(5.0, 0.0), 0.0, 0.0, Motion::Moving { p: 1 })
            .with_grid(presets::RESONANT_TAU_MAX, presets::PRESET_STEPS);
        let system = self.apply_to(&base)?;
        let engine = self
            .engine
            .unwrap_or(if system.delta == 0.0 { Engine::Both } else { Engine::Numeric });
        let cfg = ScenarioConfig {
            system,
            engine,
            preset: None,
            output_path: self.out.clone(),
            emit_unwrapped: self.emit_unwrapped.unwrap_or(false),
            tolerance: self.tolerance.unwrap_or(DEFAULT_TOLERANCE),
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScenarioConfig {
    pub system: SystemConfig,
    pub engine: Engine,
    pub preset: Option<String>,
    pub output_path: Option<PathBuf>,
    pub emit_unwrapped: bool,
    pub tolerance: f64,
}

impl ScenarioConfig {
    pub fn new(system: SystemConfig, engine: Engine) -> Self {
        Self {
            system,
            engine,
            preset: None,
            output_path: None,
            emit_unwrapped: false,
            tolerance: DEFAULT_TOLERANCE,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.system.validate()?;
        if self.engine != Engine::Numeric && self.system.delta != 0.0 {
            return Err(Error::Config(format!(
                "engine {:?} needs delta = 0 (got {}); use the numeric engine",
                self.engine, self.system.delta
            )));
        }
        if !(self.tolerance.is_finite() && self.tolerance > 0.0) {
            return Err(Error::Config(format!("tolerance must be positive, got {}", self.tolerance)));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DeviationReport {
    /// `max |z_numeric − z_analytic|`.
    pub max_abs: f64,
    pub max_abs_x: f64,
    pub max_abs_y: f64,
    pub tau_at_max: f64,
    pub n_points: usize,
}

pub fn deviation_report(analytic: &PhaseTimeSeries, numeric: &PhaseTimeSeries) -> Result<DeviationReport> {
    if analytic.len() != numeric.len() {
        return Err(Error::LengthMismatch(analytic.len(), numeric.len()));
    }
    let mut rep = DeviationReport {
        max_abs: 0.0,
        max_abs_x: 0.0,
        max_abs_y: 0.0,
        tau_at_max: 0.0,
        n_points: analytic.len(),
    };
    for (a, n) in analytic.records.iter().zip(&numeric.records) {
        let (dx, dy) = ((n.x - a.x).abs(), (n.y - a.y).abs());
        rep.max_abs_x = rep.max_abs_x.max(dx);
        rep.max_abs_y = rep.max_abs_y.max(dy);
        let d = dx.hypot(dy);
        if d > rep.max_abs {
            rep.max_abs = d;
            rep.tau_at_max = a.tau;
        }
    }
    Ok(rep)
}

#[derive(Clone, Debug, Serialize)]
pub struct IntegratorReport {
    pub dt: f64,
    pub substeps_per_output: usize,
    pub rule: evolver::StepRule,
    pub max_norm_error: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct RunMetadata {
    pub tool: &'static str,
    pub version: &'static str,
    pub preset: Option<String>,
    pub engine: Engine,
    pub parameters: SystemConfig,
    pub epsilon_tail: f64,
    pub truncation: Truncation,
    pub integrator: Option<IntegratorReport>,
    pub deviation: Option<DeviationReport>,
    pub files: Vec<PathBuf>,
    pub wall_time_seconds: f64,
}

#[derive(Clone, Debug)]
pub struct ScenarioOutput {
    pub analytic: Option<PhaseTimeSeries>,
    pub numeric: Option<PhaseTimeSeries>,
    pub deviation: Option<DeviationReport>,
    pub metadata: RunMetadata,
}

/// Run the configured engines; nothing is written.
pub fn run_scenario(config: &ScenarioConfig) -> Result<ScenarioOutput> {
    config.validate()?;
    let start = Instant::now();
    let sys = &config.system;
    let dist = field::superposed_distribution(&sys.field)?;
    let analytic = match config.engine {
        Engine::Analytic | Engine::Both => Some(observables::series_from_analytic(sys, &dist)?),
        Engine::Numeric => None,
    };
    let (numeric, integrator) = match config.engine {
        Engine::Numeric | Engine::Both => {
            let psi0 = system::initial_state(sys, &dist);
            let integ = Integrator::for_config(sys, dist.n_max);
            let traj = evolver::evolve_with(&psi0, sys, &integ)?;
            let report = IntegratorReport {
                dt: integ.dt(sys.tau_max / (sys.n_steps - 1) as f64),
                substeps_per_output: integ.substeps,
                rule: integ.rule,
                max_norm_error: traj.norm_error.iter().fold(0.0f64, |m, &e| m.max(e)),
            };
            (Some(observables::series_from_trajectory(&traj)?), Some(report))
        }
        Engine::Analytic => (None, None),
    };
    let deviation = match (&analytic, &numeric) {
        (Some(a), Some(n)) => Some(deviation_report(a, n)?),
        _ => None,
    };
    Ok(ScenarioOutput {
        analytic,
        numeric,
        deviation,
        metadata: RunMetadata {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            preset: config.preset.clone(),
            engine: config.engine,
            parameters: *sys,
            epsilon_tail: sys.field.epsilon_tail,
            truncation: dist.truncation(),
            integrator,
            deviation,
            files: Vec::new(),
            wall_time_seconds: start.elapsed().as_secs_f64(),
        },
    })
}

/// Analytic-vs-numeric overlap deviation; errors if above `config.tolerance`.
pub fn compare_engines(config: &ScenarioConfig) -> Result<DeviationReport> {
    if config.system.delta != 0.0 {
        return Err(Error::ResonanceRequired(config.system.delta));
    }
    let both = ScenarioConfig {
        engine: Engine::Both,
        ..config.clone()
    };
    let out = run_scenario(&both)?;
    let rep = out.deviation.expect("both engines ran");
    if rep.max_abs > config.tolerance {
        return Err(Error::ToleranceExceeded {
            deviation: rep.max_abs,
            tolerance: config.tolerance,
        });
    }
    Ok(rep)
}

fn with_suffix(base: &Path, suffix: &str) -> PathBuf {
    let stem = base.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let ext = base
        .extension()
        .map(|e| e.to_string_lossy().into_owned())
        .unwrap_or_else(|| "csv".into());
    base.with_file_name(format!("{stem}.{suffix}.{ext}"))
}

/// Paths for the series that `engine` produces at `base`: the path itself for
/// a single engine, `<stem>.analytic.csv`, `<stem>.numeric.csv` and
/// `<stem>.deviation.csv` for both.
pub fn output_paths(base: &Path, engine: Engine) -> Vec<PathBuf> {
    match engine {
        Engine::Analytic | Engine::Numeric => vec![base.to_path_buf()],
        Engine::Both => ["analytic", "numeric", "deviation"]
            .iter()
            .map(|s| with_suffix(base, s))
            .collect(),
    }
}

pub fn metadata_path(base: &Path) -> PathBuf {
    let mut s = base.as_os_str().to_owned();
    s.push(".meta.json");
    PathBuf::from(s)
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    Ok(BufWriter::new(File::create(path)?))
}

/// Write the CSV files and the `<base>.meta.json` sidecar; returns the CSV
/// paths.
pub fn write_outputs(output: &mut ScenarioOutput, base: &Path, emit_unwrapped: bool) -> Result<Vec<PathBuf>> {
    let paths = output_paths(base, output.metadata.engine);
    match (&output.analytic, &output.numeric) {
        (Some(a), Some(n)) => {
            let mut w = create(&paths[0])?;
            csv::write_series(&mut w, a, emit_unwrapped)?;
            w.flush()?;
            let mut w = create(&paths[1])?;
            csv::write_series(&mut w, n, emit_unwrapped)?;
            w.flush()?;
            let mut w = create(&paths[2])?;
            csv::write_deviation(&mut w, a, n)?;
            w.flush()?;
        }
        (Some(s), None) | (None, Some(s)) => {
            let mut w = create(&paths[0])?;
            csv::write_series(&mut w, s, emit_unwrapped)?;
            w.flush()?;
        }
        (None, None) => unreachable!("at least one engine runs"),
    }
    output.metadata.files = paths.clone();
    let mut w = create(&metadata_path(base))?;
    serde_json::to_writer_pretty(&mut w, &output.metadata)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(paths)
}

/// Scenario configs for every variant of a preset, with `settings` applied
/// on top and outputs placed under `dir`.
pub fn preset_scenarios(preset: &Preset, settings: &ScenarioSettings, dir: &Path) -> Result<Vec<ScenarioConfig>> {
    preset
        .variants
        .iter()
        .map(|v| {
            let system = settings.apply_to(&v.config)?;
            let name = if v.label.is_empty() {
                format!("{}.csv", preset.name)
            } else {
                format!("{}_{}.csv", preset.name, v.label)
            };
            let cfg = ScenarioConfig {
                system,
                engine: settings.engine.unwrap_or(preset.engine),
                preset: Some(preset.name.to_string()),
                output_path: Some(dir.join(name)),
                emit_unwrapped: settings.emit_unwrapped.unwrap_or(false),
                tolerance: settings.tolerance.unwrap_or(DEFAULT_TOLERANCE),
            };
            cfg.validate()?;
            Ok(cfg)
        })
        .collect()
}
