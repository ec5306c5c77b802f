use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use cascade_phase::scenario::{
    self, compare_engines, find_preset, list_presets, parse_angle, run_scenario, AngleValue, Engine,
    MotionKind, ScenarioSettings,
};
use cascade_phase::Error;

#[derive(Parser)]
#[command(name = "cascade-phase", version, about = "Phases of a moving cascade atom in a cavity")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario and write its phase time series.
    Run(RunArgs),
    /// Regenerate the data behind a named figure; --out is a directory.
    Preset {
        name: String,
        #[command(flatten)]
        args: RunArgs,
    },
    /// Check the numerical engine against the closed form at resonance.
    Compare(RunArgs),
    /// Print the available presets.
    ListPresets,
}

#[derive(Args, Default)]
struct RunArgs {
    /// JSON file with the same keys as the flags; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, allow_negative_numbers = true)]
    alpha: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    delta: Option<f64>,
    /// Radians, or a multiple of pi such as `pi/4`.
    #[arg(long, allow_hyphen_values = true, value_parser = parse_theta)]
    theta: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    r: Option<f64>,
    #[arg(long)]
    p: Option<u32>,
    #[arg(long, value_parser = parse_motion)]
    motion: Option<MotionKind>,
    #[arg(long)]
    tau_max: Option<f64>,
    /// Output grid points.
    #[arg(long)]
    steps: Option<usize>,
    /// Internal integration step.
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long, value_parser = parse_engine)]
    engine: Option<Engine>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    emit_unwrapped: bool,
    #[arg(long)]
    epsilon_tail: Option<f64>,
    /// Fix the photon cutoff instead of choosing it from the tail mass.
    #[arg(long)]
    n_max: Option<usize>,
    /// Bound on the engine deviation for `compare`.
    #[arg(long)]
    tolerance: Option<f64>,
}

fn parse_theta(s: &str) -> Result<f64, String> {
    parse_angle(s).map_err(|e| e.to_string())
}

fn parse_motion(s: &str) -> Result<MotionKind, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_engine(s: &str) -> Result<Engine, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

impl RunArgs {
    fn settings(&self) -> cascade_phase::Result<ScenarioSettings> {
        let file = match &self.config {
            Some(path) => ScenarioSettings::from_json_file(path)?,
            None => ScenarioSettings::default(),
        };
        let cli = ScenarioSettings {
            alpha: self.alpha,
            delta: self.delta,
            theta: self.theta.map(AngleValue::Number),
            r: self.r,
            p: self.p,
            motion: self.motion,
            tau_max: self.tau_max,
            steps: self.steps,
            dt: self.dt,
            engine: self.engine,
            out: self.out.clone(),
            emit_unwrapped: self.emit_unwrapped.then_some(true),
            epsilon_tail: self.epsilon_tail,
            n_max: self.n_max,
            g: None,
            tolerance: self.tolerance,
        };
        Ok(file.overridden_by(cli))
    }
}

fn run(args: &RunArgs) -> cascade_phase::Result<()> {
    let cfg = args.settings()?.resolve()?;
    let mut out = run_scenario(&cfg)?;
    let base = cfg
        .output_path
        .clone()
        .unwrap_or_else(|| PathBuf::from("cascade_phase.csv"));
    for p in scenario::write_outputs(&mut out, &base, cfg.emit_unwrapped)? {
        println!("{}", p.display());
    }
    if let Some(d) = out.deviation {
        eprintln!("max |z_numeric - z_analytic| = {:e} at tau = {}", d.max_abs, d.tau_at_max);
    }
    Ok(())
}

fn preset(name: &str, args: &RunArgs) -> cascade_phase::Result<()> {
    let preset = find_preset(name).ok_or_else(|| {
        let names: Vec<_> = list_presets().iter().map(|p| p.name).collect();
        Error::Config(format!("unknown preset '{name}' (one of {})", names.join(", ")))
    })?;
    let settings = args.settings()?;
    let dir = settings.out.clone().unwrap_or_else(|| PathBuf::from("."));
    for cfg in scenario::preset_scenarios(&preset, &settings, &dir)? {
        let mut out = run_scenario(&cfg)?;
        let base = cfg.output_path.as_deref().unwrap_or(Path::new("."));
        for p in scenario::write_outputs(&mut out, base, cfg.emit_unwrapped)? {
            println!("{}", p.display());
        }
    }
    Ok(())
}

fn compare(args: &RunArgs) -> cascade_phase::Result<()> {
    let mut settings = args.settings()?;
    settings.engine = Some(Engine::Both);
    let cfg = settings.resolve()?;
    let rep = compare_engines(&cfg)?;
    println!(
        "max_abs={:e} max_abs_x={:e} max_abs_y={:e} tau_at_max={} points={} tolerance={:e}",
        rep.max_abs, rep.max_abs_x, rep.max_abs_y, rep.tau_at_max, rep.n_points, cfg.tolerance
    );
    Ok(())
}

fn list() {
    for p in list_presets() {
        let labels: Vec<_> = p.variants.iter().map(|v| v.label).filter(|l| !l.is_empty()).collect();
        let engine = format!("{:?}", p.engine).to_lowercase();
        if labels.is_empty() {
            println!("{:<6} {:<8} {}", p.name, engine, p.caption);
        } else {
            println!("{:<6} {:<8} {} [{}]", p.name, engine, p.caption, labels.join(", "));
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run(args) => run(args),
        Command::Preset { name, args } => preset(name, args),
        Command::Compare(args) => compare(args),
        Command::ListPresets => {
            list();
            Ok(())
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
