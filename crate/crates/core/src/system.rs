//! Physical configuration, mode shape, initial state and the invariant
//! manifold decomposition of the cascade Hamiltonian.
//!
//! The interaction couples `|1,n⟩ ↔ |2,n+1⟩` with strength `√(n+1)` and
//! `|2,n+1⟩ ↔ |3,n+2⟩` with strength `√(n+2)`, so the excitation number
//! `level_index + photons` is conserved and the Hilbert space splits into
//! at most three-dimensional blocks.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{FieldSpec, PhotonDistribution};

/// Atomic level of the ladder: `Upper` is |1⟩, `Middle` |2⟩, `Ground` |3⟩.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Level {
    Upper,
    Middle,
    Ground,
}

impl Level {
    pub const ALL: [Level; 3] = [Level::Upper, Level::Middle, Level::Ground];

    /// Zero-based position in the ladder (`Upper` = 0).
    #[inline]
    pub fn index(self) -> usize {
        match self {
            Level::Upper => 0,
            Level::Middle => 1,
            Level::Ground => 2,
        }
    }
}

/// Center-of-mass motion of the atom through the cavity mode.
///
/// A moving atom samples `λ(τ) = sin(p τ)`: the atom crosses `p` half
/// wavelengths with velocity `gL/π`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "motion", rename_all = "lowercase")]
pub enum Motion {
    Moving { p: u32 },
    Neglected,
}

impl Motion {
    /// Mode shape `λ(τ)` seen by the atom.
    #[inline]
    pub fn shape(self, tau: f64) -> f64 {
        match self {
            Motion::Moving { p } => (p as f64 * tau).sin(),
            Motion::Neglected => 1.0,
        }
    }

    /// Accumulated area `∫₀^τ λ(s) ds`, i.e. `(1 − cos pτ)/p` for a moving
    /// atom and `τ` otherwise.
    #[inline]
    pub fn pulse_area(self, tau: f64) -> f64 {
        match self {
            Motion::Moving { p } => {
                let p = p as f64;
                let s = (0.5 * p * tau).sin();
                2.0 * s * s / p
            }
            Motion::Neglected => tau,
        }
    }

    /// `∫_a^b λ(s) ds`, free of the cancellation in `A(b) − A(a)`.
    #[inline]
    pub fn step_area(self, a: f64, b: f64) -> f64 {
        match self {
            Motion::Moving { p } => {
                let p = p as f64;
                2.0 * (0.5 * p * (a + b)).sin() * (0.5 * p * (b - a)).sin() / p
            }
            Motion::Neglected => b - a,
        }
    }

    /// Period of the pulse area, if any.
    pub fn period(self) -> Option<f64> {
        match self {
            Motion::Moving { p } => Some(std::f64::consts::TAU / p as f64),
            Motion::Neglected => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SystemConfig {
    /// Coupling constant; fixes the unit of the scaled time `τ = g t`.
    pub g: f64,
    /// Detuning in units of `g`.
    pub delta: f64,
    /// Atomic superposition angle (radians).
    pub theta: f64,
    #[serde(flatten)]
    pub motion: Motion,
    pub field: FieldSpec,
    pub tau_max: f64,
    /// Number of output grid points, including both ends.
    pub n_steps: usize,
    /// Internal step; `None` picks the default from the spectrum.
    pub dt_internal: Option<f64>,
}

impl SystemConfig {
    pub fn new(field: FieldSpec, theta: f64, delta: f64, motion: Motion) -> Self {
        Self {
            g: 1.0,
            delta,
            theta,
            motion,
            field,
            tau_max: 8.0 * std::f64::consts::PI,
            n_steps: 2000,
            dt_internal: None,
        }
    }

    pub fn with_grid(mut self, tau_max: f64, n_steps: usize) -> Self {
        self.tau_max = tau_max;
        self.n_steps = n_steps;
        self
    }

    pub fn with_dt(mut self, dt: f64) -> Self {
        self.dt_internal = Some(dt);
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        if !(self.g.is_finite() && self.g > 0.0) {
            return bad(format!("g must be positive, got {}", self.g));
        }
        if !self.delta.is_finite() {
            return bad(format!("delta must be finite, got {}", self.delta));
        }
        if !self.theta.is_finite() {
            return bad(format!("theta must be finite, got {}", self.theta));
        }
        if let Motion::Moving { p } = self.motion {
            if p < 1 {
                return bad("p must be at least 1 for a moving atom".into());
            }
        }
        if !(self.tau_max.is_finite() && self.tau_max > 0.0) {
            return bad(format!("tau_max must be positive, got {}", self.tau_max));
        }
        if self.n_steps < 2 {
            return bad(format!("n_steps must be at least 2, got {}", self.n_steps));
        }
        if let Some(dt) = self.dt_internal {
            if !(dt.is_finite() && dt > 0.0) {
                return bad(format!("dt must be positive, got {dt}"));
            }
        }
        self.field.validate()
    }

    /// Output grid `τ_k = τ_max k / (n_steps − 1)`.
    pub fn taus(&self) -> Vec<f64> {
        let last = (self.n_steps - 1) as f64;
        (0..self.n_steps)
            .map(|k| self.tau_max * k as f64 / last)
            .collect()
    }

    pub fn is_resonant(&self) -> bool {
        self.delta == 0.0
    }
}

pub fn mode_shape(tau: f64, config: &SystemConfig) -> f64 {
    config.motion.shape(tau)
}

pub fn pulse_area(tau: f64, config: &SystemConfig) -> f64 {
    config.motion.pulse_area(tau)
}

/// Amplitudes over `(level, photons)` for photons `0..=n_photon_cutoff`.
#[derive(Clone, Debug, PartialEq)]
pub struct CompositeState {
    n_photon_cutoff: usize,
    amplitudes: Vec<Complex64>,
}

impl CompositeState {
    pub fn zeros(n_photon_cutoff: usize) -> Self {
        Self {
            n_photon_cutoff,
            amplitudes: vec![Complex64::new(0.0, 0.0); 3 * (n_photon_cutoff + 1)],
        }
    }

    pub fn from_amplitudes(n_photon_cutoff: usize, amplitudes: Vec<Complex64>) -> Result<Self> {
        let expected = 3 * (n_photon_cutoff + 1);
        if amplitudes.len() != expected {
            return Err(Error::ShapeMismatch(expected, amplitudes.len()));
        }
        Ok(Self {
            n_photon_cutoff,
            amplitudes,
        })
    }

    #[inline]
    pub fn n_photon_cutoff(&self) -> usize {
        self.n_photon_cutoff
    }

    #[inline]
    pub fn index(&self, level: Level, photons: usize) -> usize {
        debug_assert!(photons <= self.n_photon_cutoff);
        level.index() * (self.n_photon_cutoff + 1) + photons
    }

    #[inline]
    pub fn get(&self, level: Level, photons: usize) -> Complex64 {
        self.amplitudes[self.index(level, photons)]
    }

    #[inline]
    pub fn set(&mut self, level: Level, photons: usize, value: Complex64) {
        let i = self.index(level, photons);
        self.amplitudes[i] = value;
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amplitudes
    }

    /// Amplitudes of one level, indexed by photon number.
    pub fn level(&self, level: Level) -> &[Complex64] {
        let n = self.n_photon_cutoff + 1;
        &self.amplitudes[level.index() * n..(level.index() + 1) * n]
    }

    pub fn level_mut(&mut self, level: Level) -> &mut [Complex64] {
        let n = self.n_photon_cutoff + 1;
        &mut self.amplitudes[level.index() * n..(level.index() + 1) * n]
    }

    pub fn norm_sqr(&self) -> f64 {
        crate::summation::sum(self.amplitudes.iter().map(|a| a.norm_sqr()))
    }
}

/// `cos θ |1⟩⊗|field⟩ − sin θ |2⟩⊗|field⟩` on the padded composite basis.
pub fn initial_state(config: &SystemConfig, dist: &PhotonDistribution) -> CompositeState {
    let (sin, cos) = config.theta.sin_cos();
    let mut state = CompositeState::zeros(dist.n_photon_cutoff());
    for (n, &c) in dist.weights.iter().enumerate() {
        state.set(Level::Upper, n, Complex64::new(cos * c, 0.0));
        state.set(Level::Middle, n, Complex64::new(-sin * c, 0.0));
    }
    state
}

/// A basis element `|level, photons⟩`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BasisIndex {
    pub level: Level,
    pub photons: usize,
}

impl BasisIndex {
    pub const fn new(level: Level, photons: usize) -> Self {
        Self { level, photons }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ManifoldKind {
    /// `|3,0⟩`, decoupled.
    Singleton,
    /// `|2,0⟩, |3,1⟩`.
    Pair,
    /// `|1,n⟩, |2,n+1⟩, |3,n+2⟩`.
    Triple(usize),
    /// `|1,N−1⟩, |2,N⟩` whose ground partner lies past the cutoff `N`.
    CutoffPair,
    /// `|1,N⟩`, isolated by the cutoff.
    CutoffSingleton,
}

/// One invariant subspace: an ordered chain of basis states with the
/// coupling between consecutive elements.
#[derive(Clone, Debug, PartialEq)]
pub struct ManifoldBlock {
    pub kind: ManifoldKind,
    pub basis: Vec<BasisIndex>,
    pub couplings: Vec<f64>,
}

impl ManifoldBlock {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }
}

/// Partition of the basis with photons `0..=n_photon_cutoff`.
///
/// Order: `Singleton`, `Pair`, `Triple(0..=N−2)`, then the two cutoff edges.
pub fn build_blocks(n_photon_cutoff: usize) -> Result<Vec<ManifoldBlock>> {
    use Level::*;
    let n_cut = n_photon_cutoff;
    if n_cut < 2 {
        return Err(Error::InvalidParameter(format!(
            "photon cutoff must be at least 2, got {n_cut}"
        )));
    }
    let mut blocks = Vec::with_capacity(n_cut + 3);
    blocks.push(ManifoldBlock {
        kind: ManifoldKind::Singleton,
        basis: vec![BasisIndex::new(Ground, 0)],
        couplings: vec![],
    });
    blocks.push(ManifoldBlock {
        kind: ManifoldKind::Pair,
        basis: vec![BasisIndex::new(Middle, 0), BasisIndex::new(Ground, 1)],
        couplings: vec![1.0],
    });
    for n in 0..=n_cut - 2 {
        blocks.push(ManifoldBlock {
            kind: ManifoldKind::Triple(n),
            basis: vec![
                BasisIndex::new(Upper, n),
                BasisIndex::new(Middle, n + 1),
                BasisIndex::new(Ground, n + 2),
            ],
            couplings: vec![((n + 1) as f64).sqrt(), ((n + 2) as f64).sqrt()],
        });
    }
    blocks.push(ManifoldBlock {
        kind: ManifoldKind::CutoffPair,
        basis: vec![BasisIndex::new(Upper, n_cut - 1), BasisIndex::new(Middle, n_cut)],
        couplings: vec![(n_cut as f64).sqrt()],
    });
    blocks.push(ManifoldBlock {
        kind: ManifoldKind::CutoffSingleton,
        basis: vec![BasisIndex::new(Upper, n_cut)],
        couplings: vec![],
    });
    Ok(blocks)
}
