//! Overlaps, phases and level populations.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::Serialize;

use crate::analytic::{self, OverlapValue};
use crate::error::{Error, Result};
use crate::evolver::Trajectory;
use crate::field::PhotonDistribution;
use crate::summation::{ComplexSum, NeumaierSum};
use crate::system::{CompositeState, Level, SystemConfig};

/// Below this overlap modulus phases are reported as gaps.
pub const PHASE_MODULUS_FLOOR: f64 = 1e-12;

/// `⟨a|b⟩`, conjugating the first argument.
pub fn overlap(psi0: &CompositeState, psit: &CompositeState) -> Result<Complex64> {
    let (a, b) = (psi0.amplitudes(), psit.amplitudes());
    if a.len() != b.len() {
        return Err(Error::ShapeMismatch(a.len(), b.len()));
    }
    let mut acc = ComplexSum::new();
    for (x, y) in a.iter().zip(b) {
        acc.add(x.conj() * y);
    }
    Ok(acc.value())
}

/// Wrap into `(−π, π]`.
pub fn wrap_phase(phi: f64) -> f64 {
    let mut w = phi - TAU * ((phi + PI) / TAU).floor();
    if w <= -PI {
        w += TAU;
    }
    if w > PI {
        w -= TAU;
    }
    w + 0.0
}

/// `arg z` in `(−π, π]`, or `None` when `|z|` is too small to carry a phase.
pub fn pancharatnam_phase(z: Complex64) -> Option<f64> {
    let m = z.norm();
    if m.is_nan() || m <= PHASE_MODULUS_FLOOR {
        return None;
    }
    let a = z.im.atan2(z.re);
    Some(if a == -PI { PI } else { a + 0.0 })
}

/// `−∫₀^τ ⟨H⟩/g` on the output grid.
///
/// `⟨H⟩ = λ ⟨V⟩`; each internal step contributes its exact mode-shape area
/// times the trapezoidal mean of `⟨V⟩` at its ends.
pub fn dynamical_phase(trajectory: &Trajectory) -> Vec<f64> {
    let m = trajectory.integrator.substeps;
    let v = &trajectory.fine_coupling;
    let mut out = Vec::with_capacity(trajectory.len());
    let mut acc = NeumaierSum::new();
    out.push(0.0);
    for (i, area) in trajectory.fine_step_area.iter().enumerate() {
        acc.add(-area * 0.5 * (v[i] + v[i + 1]));
        if (i + 1) % m == 0 {
            out.push(acc.value() + 0.0);
        }
    }
    out
}

/// `wrap(total − dynamical)`, keeping gaps of `total`.
pub fn geometric_phase(total: &[Option<f64>], dynamical: &[f64]) -> Result<Vec<Option<f64>>> {
    if total.len() != dynamical.len() {
        return Err(Error::LengthMismatch(total.len(), dynamical.len()));
    }
    Ok(total
        .iter()
        .zip(dynamical)
        .map(|(t, d)| t.map(|t| wrap_phase(t - d)))
        .collect())
}

/// `(ρ11, ρ22, ρ33)` with the field traced out.
pub fn populations(state: &CompositeState) -> [f64; 3] {
    Level::ALL.map(|l| crate::summation::sum(state.level(l).iter().map(|a| a.norm_sqr())))
}

/// Successive differences folded into `(−π, π]`, skipping gaps.
pub fn unwrap_phases(phases: &[Option<f64>]) -> Vec<Option<f64>> {
    let mut out = Vec::with_capacity(phases.len());
    let mut last: Option<(f64, f64)> = None; // (wrapped, unwrapped)
    for p in phases {
        match (p, last) {
            (None, _) => out.push(None),
            (Some(p), None) => {
                last = Some((*p, *p));
                out.push(Some(*p));
            }
            (Some(p), Some((prev, acc))) => {
                let u = acc + wrap_phase(p - prev);
                last = Some((*p, u));
                out.push(Some(u));
            }
        }
    }
    out
}

/// One row of a phase time series.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PhaseRecord {
    pub tau: f64,
    pub x: f64,
    pub y: f64,
    pub phi_pancharatnam: Option<f64>,
    pub phi_dynamical: Option<f64>,
    pub phi_geometric: Option<f64>,
    pub phi_eq5: Option<f64>,
    pub populations: Option<[f64; 3]>,
    pub norm_error: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct PhaseTimeSeries {
    pub records: Vec<PhaseRecord>,
}

impl PhaseTimeSeries {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn taus(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.tau).collect()
    }

    pub fn unwrapped_pancharatnam(&self) -> Vec<Option<f64>> {
        let p: Vec<_> = self.records.iter().map(|r| r.phi_pancharatnam).collect();
        unwrap_phases(&p)
    }
}

fn record(tau: f64, z: Complex64, phi_dynamical: f64) -> PhaseRecord {
    let phi_pancharatnam = pancharatnam_phase(z);
    let phi_eq5 = if z.norm() > PHASE_MODULUS_FLOOR {
        analytic::phase_eq5(z.re, z.im).ok()
    } else {
        None
    };
    PhaseRecord {
        tau,
        x: z.re,
        y: z.im,
        phi_pancharatnam,
        phi_dynamical: Some(phi_dynamical),
        phi_geometric: phi_pancharatnam.map(|p| wrap_phase(p - phi_dynamical)),
        phi_eq5,
        populations: None,
        norm_error: None,
    }
}

/// Phase series of a numerically evolved trajectory.
pub fn series_from_trajectory(trajectory: &Trajectory) -> Result<PhaseTimeSeries> {
    let psi0 = trajectory.initial();
    let dynamical = dynamical_phase(trajectory);
    let mut records = Vec::with_capacity(trajectory.len());
    for (k, state) in trajectory.states.iter().enumerate() {
        let z = overlap(psi0, state)?;
        let mut r = record(trajectory.taus[k], z, dynamical[k]);
        r.populations = Some(populations(state));
        r.norm_error = Some(trajectory.norm_error[k]);
        records.push(r);
    }
    Ok(PhaseTimeSeries { records })
}

/// Phase series from the closed-form resonant engine. Populations and norm
/// errors are not available there and stay empty.
pub fn series_from_analytic(config: &SystemConfig, dist: &PhotonDistribution) -> Result<PhaseTimeSeries> {
    let taus = config.taus();
    let values: Vec<OverlapValue> = analytic::overlap_series(&taus, config, dist)?;
    let mut records = Vec::with_capacity(values.len());
    for v in values {
        let d = analytic::dynamical_phase_resonant(v.tau, config, dist)?;
        records.push(record(v.tau, Complex64::new(v.x, v.y), d));
    }
    Ok(PhaseTimeSeries { records })
}
