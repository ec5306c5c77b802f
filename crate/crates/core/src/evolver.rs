//! Numerical propagation of the composite state for arbitrary detuning and
//! motion.
//!
//! Each invariant block is evolved on its own. Inside a block the
//! interaction-picture Hamiltonian carries phases `e^{±iΔτ}`; the frame
//! `ψ_I = D(τ) ψ_R` with `D = diag(1, e^{iΔτ}, 1)` over the levels removes
//! them, leaving the real symmetric generator
//!
//! ```text
//! H_R(τ) = λ(τ) V + Δ |2⟩⟨2|
//! ```
//!
//! whose only time dependence is the mode shape. Every internal step
//! freezes `H_R` and exponentiates it exactly through its eigenvectors,
//! `U = Σ_j e^{−iE_j h} |φ_j⟩⟨φ_j|`. Stored states are mapped back to the
//! interaction picture, where the overlap with the initial state is taken.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::eigen::{eigen_symmetric2, eigen_symmetric3, SymmetricMatrix3};
use crate::error::{Error, Result};
use crate::summation::NeumaierSum;
use crate::system::{CompositeState, Level, ManifoldBlock, Motion, SystemConfig};

/// Norm error that aborts a run.
pub const NORM_DRIFT_LIMIT: f64 = 1e-6;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Frozen block of `H_R / g`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum BlockHamiltonian {
    One(f64),
    /// `[[a, b], [b, c]]`
    Two { a: f64, b: f64, c: f64 },
    Three(SymmetricMatrix3),
}

/// Exponential of a [`BlockHamiltonian`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum BlockPropagator {
    One(Complex64),
    Two([[Complex64; 2]; 2]),
    Three([[Complex64; 3]; 3]),
}

impl BlockPropagator {
    #[inline]
    pub fn apply(&self, amps: &mut [Complex64]) {
        match self {
            BlockPropagator::One(u) => amps[0] *= u,
            BlockPropagator::Two(u) => {
                let (x, y) = (amps[0], amps[1]);
                amps[0] = u[0][0] * x + u[0][1] * y;
                amps[1] = u[1][0] * x + u[1][1] * y;
            }
            BlockPropagator::Three(u) => {
                let (x, y, z) = (amps[0], amps[1], amps[2]);
                amps[0] = u[0][0] * x + u[0][1] * y + u[0][2] * z;
                amps[1] = u[1][0] * x + u[1][1] * y + u[1][2] * z;
                amps[2] = u[2][0] * x + u[2][1] * y + u[2][2] * z;
            }
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            BlockPropagator::One(_) => 1,
            BlockPropagator::Two(_) => 2,
            BlockPropagator::Three(_) => 3,
        }
    }

    #[inline]
    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        match self {
            BlockPropagator::One(u) => *u,
            BlockPropagator::Two(u) => u[i][j],
            BlockPropagator::Three(u) => u[i][j],
        }
    }

    /// `max |(U†U − I)_ij|`.
    pub fn unitarity_error(&self) -> f64 {
        let n = self.dim();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let mut s = ZERO;
                for k in 0..n {
                    s += self.entry(k, i).conj() * self.entry(k, j);
                }
                if i == j {
                    s -= 1.0;
                }
                worst = worst.max(s.norm());
            }
        }
        worst
    }
}

/// Block of `H_R` with the mode shape already evaluated.
pub fn block_hamiltonian_with_shape(block: &ManifoldBlock, shape: f64, delta: f64) -> BlockHamiltonian {
    let diag = |k: usize| {
        if block.basis[k].level == Level::Middle {
            delta
        } else {
            0.0
        }
    };
    match block.dim() {
        1 => BlockHamiltonian::One(diag(0)),
        2 => BlockHamiltonian::Two {
            a: diag(0),
            b: shape * block.couplings[0],
            c: diag(1),
        },
        3 => BlockHamiltonian::Three(SymmetricMatrix3::new(
            diag(0),
            shape * block.couplings[0],
            0.0,
            diag(1),
            shape * block.couplings[1],
            diag(2),
        )),
        d => unreachable!("manifold blocks have at most three states, got {d}"),
    }
}

/// Block of the rotating-frame Hamiltonian `H_R(τ)/g`.
pub fn block_hamiltonian(block: &ManifoldBlock, tau: f64, config: &SystemConfig) -> BlockHamiltonian {
    block_hamiltonian_with_shape(block, config.motion.shape(tau), config.delta)
}

/// `exp(−i H dτ)` by spectral decomposition of the frozen `H`.
pub fn step_propagator(h: &BlockHamiltonian, dtau: f64) -> Result<BlockPropagator> {
    let phase = |e: f64| {
        let (s, c) = (e * dtau).sin_cos();
        Complex64::new(c, -s)
    };
    Ok(match *h {
        BlockHamiltonian::One(e) => BlockPropagator::One(phase(e)),
        BlockHamiltonian::Two { a, b, c } => {
            let eig = eigen_symmetric2(a, b, c);
            let mut u = [[ZERO; 2]; 2];
            for j in 0..2 {
                let f = phase(eig.values[j]);
                let v = eig.vectors[j];
                for r in 0..2 {
                    for s in 0..2 {
                        u[r][s] += f * (v[r] * v[s]);
                    }
                }
            }
            BlockPropagator::Two(u)
        }
        BlockHamiltonian::Three(m) => {
            let eig = eigen_symmetric3(&m)?;
            let mut u = [[ZERO; 3]; 3];
            for j in 0..3 {
                let f = phase(eig.values[j]);
                let v = eig.vectors[j];
                for r in 0..3 {
                    for s in 0..3 {
                        u[r][s] += f * (v[r] * v[s]);
                    }
                }
            }
            BlockPropagator::Three(u)
        }
    })
}

/// How the mode shape is frozen over one internal step `[a, b]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StepRule {
    /// `λ((a + b)/2)`.
    Midpoint,
    /// `∫_a^b λ / (b − a)`; exact whenever `H_R` commutes with itself in time.
    StepAverage,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Integrator {
    /// Internal steps per output interval.
    pub substeps: usize,
    pub rule: StepRule,
    /// Track `max ‖U†U − I‖` over all step propagators.
    pub check_unitarity: bool,
}

/// `min(0.002, 0.1 / max(|Δ|, √(2 n_max + 3)))`.
pub fn default_dt(delta: f64, n_max: usize) -> f64 {
    let fastest = delta.abs().max(((2 * n_max + 3) as f64).sqrt());
    0.002f64.min(0.1 / fastest)
}

impl Integrator {
    /// Substeps that keep the internal step at or below the configured (or
    /// default) `dt`.
    pub fn for_config(config: &SystemConfig, n_max: usize) -> Self {
        let dt = config.dt_internal.unwrap_or_else(|| default_dt(config.delta, n_max));
        let interval = config.tau_max / (config.n_steps - 1) as f64;
        let substeps = ((interval / dt) * (1.0 - 1e-12)).ceil().max(1.0) as usize;
        Self {
            substeps,
            rule: StepRule::StepAverage,
            check_unitarity: false,
        }
    }

    pub fn with_substeps(mut self, substeps: usize) -> Self {
        self.substeps = substeps;
        self
    }

    pub fn with_rule(mut self, rule: StepRule) -> Self {
        self.rule = rule;
        self
    }

    pub fn checking_unitarity(mut self) -> Self {
        self.check_unitarity = true;
        self
    }

    /// Internal step for an output interval of length `interval`.
    pub fn dt(&self, interval: f64) -> f64 {
        interval / self.substeps as f64
    }
}

/// States on the output grid plus the fine-grid data needed for the
/// dynamical phase.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub taus: Vec<f64>,
    /// Interaction-picture states at `taus`.
    pub states: Vec<CompositeState>,
    /// `⟨V⟩` at `taus`, with `V` the coupling operator (`H = g λ V` at
    /// resonance).
    pub expectation_v: Vec<f64>,
    /// `⟨H(τ)⟩ / g` at `taus`.
    pub h_expectation: Vec<f64>,
    /// `|‖ψ‖² − 1|` at `taus`.
    pub norm_error: Vec<f64>,
    /// Internal grid; `fine_taus[k * substeps] == taus[k]`.
    pub fine_taus: Vec<f64>,
    /// `⟨V⟩` on the internal grid.
    pub fine_coupling: Vec<f64>,
    /// `∫ λ` over each internal step.
    pub fine_step_area: Vec<f64>,
    pub integrator: Integrator,
    /// Worst step-propagator unitarity error, when tracked.
    pub max_unitarity_error: Option<f64>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.taus.len()
    }

    pub fn is_empty(&self) -> bool {
        self.taus.is_empty()
    }

    pub fn initial(&self) -> &CompositeState {
        &self.states[0]
    }
}

struct BlockRun {
    outputs: Vec<Complex64>,
    fine_coupling: Vec<f64>,
    unitarity: f64,
}

#[inline]
fn coupling_expectation(block: &ManifoldBlock, amps: &[Complex64]) -> f64 {
    let mut v = 0.0;
    for (k, c) in block.couplings.iter().enumerate() {
        v += 2.0 * c * (amps[k].conj() * amps[k + 1]).re;
    }
    v
}

#[inline]
fn frozen_shape(motion: Motion, rule: StepRule, a: f64, b: f64) -> f64 {
    match rule {
        StepRule::Midpoint => motion.shape(0.5 * (a + b)),
        StepRule::StepAverage => motion.step_area(a, b) / (b - a),
    }
}

fn run_block(
    block: &ManifoldBlock,
    initial: &CompositeState,
    config: &SystemConfig,
    taus: &[f64],
    integrator: &Integrator,
) -> Result<BlockRun> {
    let dim = block.dim();
    let m = integrator.substeps;
    let mut amps = [ZERO; 3];
    for (k, e) in block.basis.iter().enumerate() {
        amps[k] = initial.get(e.level, e.photons);
    }
    let amps = &mut amps[..dim];
    let mut outputs = Vec::with_capacity(taus.len() * dim);
    outputs.extend_from_slice(amps);
    let mut fine = Vec::with_capacity((taus.len() - 1) * m + 1);
    fine.push(coupling_expectation(block, amps));
    let mut unitarity = 0.0f64;
    // A block with no amplitude stays empty; skip its arithmetic.
    let live = amps.iter().any(|a| *a != ZERO);
    for w in taus.windows(2) {
        let (t0, t1) = (w[0], w[1]);
        let h = (t1 - t0) / m as f64;
        for j in 0..m {
            let a = t0 + j as f64 * h;
            let b = if j + 1 == m { t1 } else { t0 + (j + 1) as f64 * h };
            if live || integrator.check_unitarity {
                let shape = frozen_shape(config.motion, integrator.rule, a, b);
                let hb = block_hamiltonian_with_shape(block, shape, config.delta);
                let u = step_propagator(&hb, b - a)?;
                if integrator.check_unitarity {
                    unitarity = unitarity.max(u.unitarity_error());
                }
                u.apply(amps);
            }
            fine.push(coupling_expectation(block, amps));
        }
        outputs.extend_from_slice(amps);
    }
    Ok(BlockRun {
        outputs,
        fine_coupling: fine,
        unitarity,
    })
}

/// Evolve with the integrator implied by `config`.
pub fn evolve(initial: &CompositeState, config: &SystemConfig) -> Result<Trajectory> {
    // n_cut = n_max + 2 for states built from a field distribution.
    let n_max = initial.n_photon_cutoff().saturating_sub(2);
    evolve_with(initial, config, &Integrator::for_config(config, n_max))
}

pub fn evolve_with(
    initial: &CompositeState,
    config: &SystemConfig,
    integrator: &Integrator,
) -> Result<Trajectory> {
    config.validate()?;
    if integrator.substeps == 0 {
        return Err(Error::InvalidParameter("substeps must be positive".into()));
    }
    let n_cut = initial.n_photon_cutoff();
    let blocks = crate::system::build_blocks(n_cut)?;
    let taus = config.taus();
    let m = integrator.substeps;

    let runs: Vec<BlockRun> = blocks
        .par_iter()
        .map(|b| run_block(b, initial, config, &taus, integrator))
        .collect::<Result<_>>()?;

    // Reductions in fixed block order.
    let n_fine = (taus.len() - 1) * m + 1;
    let mut fine_coupling = Vec::with_capacity(n_fine);
    for i in 0..n_fine {
        let mut acc = NeumaierSum::new();
        for run in &runs {
            acc.add(run.fine_coupling[i]);
        }
        fine_coupling.push(acc.value());
    }
    let mut fine_taus = Vec::with_capacity(n_fine);
    let mut fine_step_area = Vec::with_capacity(n_fine - 1);
    fine_taus.push(taus[0]);
    for w in taus.windows(2) {
        let h = (w[1] - w[0]) / m as f64;
        for j in 0..m {
            let a = w[0] + j as f64 * h;
            let b = if j + 1 == m { w[1] } else { w[0] + (j + 1) as f64 * h };
            fine_taus.push(b);
            fine_step_area.push(config.motion.step_area(a, b));
        }
    }

    let mut states = Vec::with_capacity(taus.len());
    let mut norm_error = Vec::with_capacity(taus.len());
    let mut expectation_v = Vec::with_capacity(taus.len());
    let mut h_expectation = Vec::with_capacity(taus.len());
    for (k, &tau) in taus.iter().enumerate() {
        let mut state = CompositeState::zeros(n_cut);
        for (block, run) in blocks.iter().zip(&runs) {
            let d = block.dim();
            for (e, a) in block.basis.iter().zip(&run.outputs[k * d..(k + 1) * d]) {
                state.set(e.level, e.photons, *a);
            }
        }
        if config.delta != 0.0 {
            let (s, c) = (config.delta * tau).sin_cos();
            let frame = Complex64::new(c, s);
            for a in state.level_mut(Level::Middle) {
                *a *= frame;
            }
        }
        let err = (state.norm_sqr() - 1.0).abs();
        if err > NORM_DRIFT_LIMIT {
            return Err(Error::NormDrift {
                tau,
                error: err,
                limit: NORM_DRIFT_LIMIT,
            });
        }
        let v = fine_coupling[k * m];
        expectation_v.push(v);
        h_expectation.push(config.motion.shape(tau) * v);
        norm_error.push(err);
        states.push(state);
    }

    let max_unitarity_error = integrator
        .check_unitarity
        .then(|| runs.iter().fold(0.0f64, |w, r| w.max(r.unitarity)));

    Ok(Trajectory {
        taus,
        states,
        expectation_v,
        h_expectation,
        norm_error,
        fine_taus,
        fine_coupling,
        fine_step_area,
        integrator: *integrator,
        max_unitarity_error,
    })
}

/// Self-convergence of the stepping under successive halving of the step.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ConvergenceReport {
    pub dt: f64,
    pub substeps: usize,
    /// `max |ψ_dt − ψ_{dt/2}|` over the output grid.
    pub deviation_half: f64,
    /// `max |ψ_{dt/2} − ψ_{dt/4}|`.
    pub deviation_quarter: f64,
    /// `log2(deviation_half / deviation_quarter)`.
    pub order: f64,
}

fn max_deviation(a: &Trajectory, b: &Trajectory) -> f64 {
    a.states
        .iter()
        .zip(&b.states)
        .flat_map(|(x, y)| x.amplitudes().iter().zip(y.amplitudes()))
        .fold(0.0f64, |m, (p, q)| m.max((p - q).norm()))
}

/// Run at `dt`, `dt/2` and `dt/4` and estimate the empirical order.
pub fn convergence_probe(config: &SystemConfig) -> Result<ConvergenceReport> {
    let dist = crate::field::superposed_distribution(&config.field)?;
    let initial = crate::system::initial_state(config, &dist);
    let base = Integrator::for_config(config, dist.n_max);
    let coarse = evolve_with(&initial, config, &base)?;
    let half = evolve_with(&initial, config, &base.with_substeps(2 * base.substeps))?;
    let quarter = evolve_with(&initial, config, &base.with_substeps(4 * base.substeps))?;
    let deviation_half = max_deviation(&coarse, &half);
    let deviation_quarter = max_deviation(&half, &quarter);
    Ok(ConvergenceReport {
        dt: base.dt(config.tau_max / (config.n_steps - 1) as f64),
        substeps: base.substeps,
        deviation_half,
        deviation_quarter,
        order: (deviation_half / deviation_quarter).log2(),
    })
}
