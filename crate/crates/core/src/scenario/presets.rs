//! Frozen parameter sets, one per standard plot.
//!
//! Resonant presets span `τ ∈ [0, 8π]`
//! (four revival periods at `p = 1`), detuned ones `τ ∈ [0, 25]`; both use
//! 2000 output points.

use std::f64::consts::{FRAC_PI_4, PI};

use serde::Serialize;

use super::Engine;
use crate::field::FieldSpec;
use crate::system::{Motion, SystemConfig};

pub const RESONANT_TAU_MAX: f64 = 8.0 * PI;
pub const DETUNED_TAU_MAX: f64 = 25.0;
pub const PRESET_STEPS: usize = 2000;

#[derive(Clone, Debug, Serialize)]
pub struct PresetVariant {
    /// File-name suffix; empty for single-curve presets.
    pub label: &'static str,
    pub config: SystemConfig,
}

#[derive(Clone, Debug, Serialize)]
pub struct Preset {
    pub name: &'static str,
    pub caption: &'static str,
    pub engine: Engine,
    pub variants: Vec<PresetVariant>,
}

fn system(theta: f64, delta: f64, r: f64, motion: Motion) -> SystemConfig {
    let tau_max = if delta == 0.0 { RESONANT_TAU_MAX } else { DETUNED_TAU_MAX };
    SystemConfig::new(FieldSpec::new(5.0, r), theta, delta, motion).with_grid(tau_max, PRESET_STEPS)
}

fn single(name: &'static str, caption: &'static str, config: SystemConfig) -> Preset {
    Preset {
        name,
        caption,
        engine: if config.delta == 0.0 { Engine::Both } else { Engine::Numeric },
        variants: vec![PresetVariant { label: "", config }],
    }
}

fn pair(
    name: &'static str,
    caption: &'static str,
    a: (&'static str, SystemConfig),
    b: (&'static str, SystemConfig),
) -> Preset {
    Preset {
        name,
        caption,
        engine: if a.1.delta == 0.0 { Engine::Both } else { Engine::Numeric },
        variants: vec![
            PresetVariant { label: a.0, config: a.1 },
            PresetVariant { label: b.0, config: b.1 },
        ],
    }
}

pub fn list_presets() -> Vec<Preset> {
    let p1 = Motion::Moving { p: 1 };
    let p2 = Motion::Moving { p: 2 };
    vec![
        single("fig1a", "populations; alpha=5, delta=0, r=0, p=1, theta=0", system(0.0, 0.0, 0.0, p1)),
        single("fig1b", "populations; alpha=5, delta=0, r=0, p=1, theta=pi/4", system(FRAC_PI_4, 0.0, 0.0, p1)),
        single("fig2a", "populations; alpha=5, delta=0, r=0, p=2, theta=0", system(0.0, 0.0, 0.0, p2)),
        single("fig2b", "populations; alpha=5, delta=0, r=0, p=2, theta=pi/4", system(FRAC_PI_4, 0.0, 0.0, p2)),
        pair(
            "fig3a",
            "phase; alpha=5, delta=0, r=0, p=1, theta in {0, pi/4}",
            ("theta0", system(0.0, 0.0, 0.0, p1)),
            ("theta_pi4", system(FRAC_PI_4, 0.0, 0.0, p1)),
        ),
        pair(
            "fig3b",
            "phase; alpha=5, delta=0, r=0, p=2, theta in {0, pi/4}",
            ("theta0", system(0.0, 0.0, 0.0, p2)),
            ("theta_pi4", system(FRAC_PI_4, 0.0, 0.0, p2)),
        ),
        pair(
            "fig4a",
            "phase; alpha=5, delta=20, theta=pi/4, motion neglected, r in {0, 1}",
            ("r0", system(FRAC_PI_4, 20.0, 0.0, Motion::Neglected)),
            ("r1", system(FRAC_PI_4, 20.0, 1.0, Motion::Neglected)),
        ),
        pair(
            "fig4b",
            "phase; alpha=5, delta=20, theta=pi/4, p=1, r in {0, 1}",
            ("r0", system(FRAC_PI_4, 20.0, 0.0, p1)),
            ("r1", system(FRAC_PI_4, 20.0, 1.0, p1)),
        ),
        pair(
            "fig4c",
            "phase; alpha=5, delta=20, theta=pi/4, p=2, r in {0, 1}",
            ("r0", system(FRAC_PI_4, 20.0, 0.0, p2)),
            ("r1", system(FRAC_PI_4, 20.0, 1.0, p2)),
        ),
        single("fig5a", "overlap x, y; alpha=5, delta=0, r=0, p=1, theta=0", system(0.0, 0.0, 0.0, p1)),
        single("fig5b", "overlap x, y; alpha=5, delta=0, r=0, p=1, theta=pi/4", system(FRAC_PI_4, 0.0, 0.0, p1)),
    ]
}

pub fn find_preset(name: &str) -> Option<Preset> {
    list_presets().into_iter().find(|p| p.name == name)
}
