//! Closed-form resonant solution.
//!
//! At `Δ = 0` the Hamiltonian is `g λ(τ) V` with a time-independent `V`, so
//! the propagator is `exp(−i A(τ) V)` with `A` the pulse area. Within the
//! manifold `|1,n⟩, |2,n+1⟩, |3,n+2⟩` this gives, with `Ω_n = √(2n+3)`,
//!
//! ```text
//! x(τ) = Σ c_n² cos²θ [(n+2) + (n+1) cos(A Ω_n)] / Ω_n²  +  Σ c_{n+1}² sin²θ cos(A Ω_n)
//! y(τ) = Σ c_n c_{n+1} sin 2θ √((n+1)/Ω_n²) sin(A Ω_n)
//! ```
//!
//! where `c_n c_{n+1} = q_n q_{n+1} (1 − r²) / B`. The series omit the
//! `|2,0⟩` amplitude (it lives in the two-state edge manifold), so they
//! differ from the full overlap by at most `2 sin²θ c_0²`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::PhotonDistribution;
use crate::summation::NeumaierSum;
use crate::system::SystemConfig;

/// Terms whose weight falls below this are not summed.
pub const TERM_SKIP: f64 = 1e-18;

/// `⟨ψ(0)|ψ(τ)⟩ = x + i y`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct OverlapValue {
    pub tau: f64,
    pub x: f64,
    pub y: f64,
}

fn require_resonance(config: &SystemConfig) -> Result<()> {
    if config.delta != 0.0 {
        return Err(Error::ResonanceRequired(config.delta));
    }
    Ok(())
}

/// Weights and Rabi frequencies of the series, independent of `τ`.
#[derive(Clone, Debug)]
pub struct ResonantSeries {
    /// `(Ω_n, upper-diagonal weight, upper-oscillating weight, middle weight, y weight)`
    terms: Vec<(f64, f64, f64, f64, f64)>,
}

impl ResonantSeries {
    pub fn new(config: &SystemConfig, dist: &PhotonDistribution) -> Result<Self> {
        require_resonance(config)?;
        let (sin, cos) = config.theta.sin_cos();
        let (sin2, cos2) = (sin * sin, cos * cos);
        let sin_2theta = (2.0 * config.theta).sin();
        let mut terms = Vec::with_capacity(dist.n_max + 1);
        for n in 0..=dist.n_max {
            let nf = n as f64;
            let omega_sq = 2.0 * nf + 3.0;
            let c_n = dist.weight(n);
            let c_next = dist.weight(n + 1);
            let upper = c_n * c_n * cos2 / omega_sq;
            let middle = c_next * c_next * sin2;
            let cross = c_n * c_next * sin_2theta * ((nf + 1.0) / omega_sq).sqrt();
            let keep = |w: f64| if w.abs() < TERM_SKIP { 0.0 } else { w };
            terms.push((
                omega_sq.sqrt(),
                keep(upper * (nf + 2.0)),
                keep(upper * (nf + 1.0)),
                keep(middle),
                keep(cross),
            ));
        }
        Ok(Self { terms })
    }

    /// `(x, y)` at pulse area `area`; summed in ascending `n`.
    pub fn evaluate(&self, area: f64) -> (f64, f64) {
        let mut x = NeumaierSum::new();
        let mut y = NeumaierSum::new();
        for &(omega, upper_const, upper_osc, middle, cross) in &self.terms {
            if upper_const == 0.0 && upper_osc == 0.0 && middle == 0.0 && cross == 0.0 {
                continue;
            }
            let (s, c) = (area * omega).sin_cos();
            if upper_const != 0.0 {
                x.add(upper_const);
            }
            if upper_osc != 0.0 || middle != 0.0 {
                x.add((upper_osc + middle) * c);
            }
            if cross != 0.0 {
                y.add(cross * s);
            }
        }
        (x.value(), y.value())
    }
}

/// Closed-form overlap at `tau`.
pub fn overlap_xy(tau: f64, config: &SystemConfig, dist: &PhotonDistribution) -> Result<OverlapValue> {
    let series = ResonantSeries::new(config, dist)?;
    let (x, y) = series.evaluate(config.motion.pulse_area(tau));
    Ok(OverlapValue { tau, x, y })
}

/// Overlaps on a grid, evaluated in parallel; each point is independent.
pub fn overlap_series(taus: &[f64], config: &SystemConfig, dist: &PhotonDistribution) -> Result<Vec<OverlapValue>> {
    use rayon::prelude::*;
    let series = ResonantSeries::new(config, dist)?;
    Ok(taus
        .par_iter()
        .map(|&tau| {
            let (x, y) = series.evaluate(config.motion.pulse_area(tau));
            OverlapValue { tau, x, y }
        })
        .collect())
}

/// `−arcsin(y / √(x² + y²))`.
///
/// Equals `−arg(x + iy)` only for `x ≥ 0`; for `x < 0` it reflects the
/// angle into `[−π/2, π/2]`.
pub fn phase_eq5(x: f64, y: f64) -> Result<f64> {
    let r = x.hypot(y);
    if r == 0.0 || !r.is_finite() {
        return Err(Error::UndefinedPhase);
    }
    // + 0.0 turns −0 into +0
    Ok(-(y / r).clamp(-1.0, 1.0).asin() + 0.0)
}

/// `⟨V⟩` in the initial state: `−sin 2θ Σ c_n c_{n+1} √(n+1)`.
pub fn coupling_expectation(config: &SystemConfig, dist: &PhotonDistribution) -> f64 {
    let mut acc = NeumaierSum::new();
    for n in 0..dist.n_max {
        acc.add(dist.weight(n) * dist.weight(n + 1) * ((n + 1) as f64).sqrt());
    }
    -(2.0 * config.theta).sin() * acc.value()
}

/// Resonant dynamical phase `−⟨V⟩₀ A(τ)`; `⟨V⟩` is conserved because the
/// Hamiltonian is proportional to `V` at all times.
pub fn dynamical_phase_resonant(tau: f64, config: &SystemConfig, dist: &PhotonDistribution) -> Result<f64> {
    require_resonance(config)?;
    Ok(-coupling_expectation(config, dist) * config.motion.pulse_area(tau) + 0.0)
}
