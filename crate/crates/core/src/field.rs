//! Photon-number distributions of coherent and cat field states.
//!
//! The field is `|α⟩ + r|−α⟩` (normalized), with α real and nonnegative.
//! In the Fock basis its amplitudes are `c_n = q_n (1 + r(−1)^n) / √B`,
//! where `q_n = e^{−α²/2} αⁿ / √n!` are the coherent-state coefficients and
//! `B = 1 + r² + 2r e^{−2α²}` is the exact normalizer.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::summation::NeumaierSum;

pub const DEFAULT_EPSILON_TAIL: f64 = 1e-12;

/// Fock states beyond the distribution cutoff that the composite basis keeps
/// so that the top manifold `|1,n⟩, |2,n+1⟩, |3,n+2⟩` is complete.
pub const BASIS_PAD: usize = 2;

// exp(-x) underflows to subnormals past this.
const LOG_SPACE_THRESHOLD: f64 = 700.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FieldSpec {
    pub alpha: f64,
    pub r: f64,
    pub epsilon_tail: f64,
    /// Explicit cutoff that bypasses the tail-mass rule.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cutoff: Option<usize>,
}

impl FieldSpec {
    pub fn new(alpha: f64, r: f64) -> Self {
        Self {
            alpha,
            r,
            epsilon_tail: DEFAULT_EPSILON_TAIL,
            cutoff: None,
        }
    }

    pub fn with_cutoff(mut self, n_max: usize) -> Self {
        self.cutoff = Some(n_max);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha.is_finite() && self.alpha >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "alpha must be finite and nonnegative, got {}",
                self.alpha
            )));
        }
        if !self.r.is_finite() {
            return Err(Error::InvalidParameter(format!("r must be finite, got {}", self.r)));
        }
        if !(self.epsilon_tail > 0.0 && self.epsilon_tail <= 1e-3) {
            return Err(Error::InvalidParameter(format!(
                "epsilon_tail must lie in (0, 1e-3], got {}",
                self.epsilon_tail
            )));
        }
        normalization_b(self.alpha, self.r).map(|_| ())
    }
}

/// Coherent-state coefficients `q_0..=q_{n_max}`.
///
/// Uses the recurrence `q_{n+1} = q_n α / √(n+1)`; when `q_0` itself would
/// underflow the same recurrence runs on logarithms.
pub fn coherent_coefficients(alpha: f64, n_max: usize) -> Vec<f64> {
    let mut q = Vec::with_capacity(n_max + 1);
    if alpha == 0.0 {
        q.push(1.0);
        q.resize(n_max + 1, 0.0);
        return q;
    }
    let half_nbar = 0.5 * alpha * alpha;
    if half_nbar < LOG_SPACE_THRESHOLD {
        let mut v = (-half_nbar).exp();
        q.push(v);
        for n in 0..n_max {
            v *= alpha / ((n + 1) as f64).sqrt();
            q.push(v);
        }
    } else {
        let ln_alpha = alpha.ln();
        let mut ln_q = -half_nbar;
        q.push(ln_q.exp());
        for n in 0..n_max {
            ln_q += ln_alpha - 0.5 * ((n + 1) as f64).ln();
            q.push(ln_q.exp());
        }
    }
    q
}

/// Exact normalizer `1 + r² + 2r e^{−2α²}` of `|α⟩ + r|−α⟩`.
pub fn normalization_b(alpha: f64, r: f64) -> Result<f64> {
    let b = 1.0 + r * r + 2.0 * r * (-2.0 * alpha * alpha).exp();
    // r = −1 at α = 0 is the only way to hit zero for real r.
    if b <= f64::EPSILON * (1.0 + r * r) {
        return Err(Error::ZeroState { alpha, r });
    }
    Ok(b)
}

#[inline]
fn parity_factor(r: f64, n: usize) -> f64 {
    if n.is_multiple_of(2) {
        1.0 + r
    } else {
        1.0 - r
    }
}

/// Result of the tail-mass truncation rule.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Truncation {
    /// Largest retained photon number of the field distribution.
    pub n_max: usize,
    /// Largest photon number of the composite basis, `n_max + 2`.
    pub n_photon_cutoff: usize,
    /// Probability mass of the field beyond `n_max`.
    pub tail_mass: f64,
}

/// Unnormalized-by-truncation weights `c_n²` far enough out that the
/// remaining mass is negligible against any admissible `epsilon_tail`.
fn weight_squares(alpha: f64, r: f64) -> Result<Vec<f64>> {
    let b = normalization_b(alpha, r)?;
    let nbar = alpha * alpha;
    // Well past the Poisson bulk; the loop below extends further if needed.
    let mut n_hi = (nbar + 12.0 * nbar.sqrt() + 40.0).ceil() as usize;
    loop {
        let q = coherent_coefficients(alpha, n_hi);
        let w: Vec<f64> = q
            .iter()
            .enumerate()
            .map(|(n, &qn)| {
                let c = qn * parity_factor(r, n);
                c * c / b
            })
            .collect();
        let last = w[n_hi].max(w[n_hi - 1]);
        if (n_hi as f64) > nbar && last < 1e-40 {
            return Ok(w);
        }
        n_hi *= 2;
    }
}

/// Smallest `n_max` whose dropped tail `Σ_{n>n_max} c_n²` is below
/// `epsilon_tail`; the composite basis then extends to `n_max + 2`.
pub fn choose_truncation(alpha: f64, r: f64, epsilon_tail: f64) -> Result<Truncation> {
    if !(epsilon_tail > 0.0 && epsilon_tail <= 1e-3) {
        return Err(Error::InvalidParameter(format!(
            "epsilon_tail must lie in (0, 1e-3], got {epsilon_tail}"
        )));
    }
    let w = weight_squares(alpha, r)?;
    // Accumulate tails from the top so small masses keep full precision.
    let mut tails = vec![0.0; w.len()];
    let mut acc = NeumaierSum::new();
    for n in (0..w.len()).rev() {
        tails[n] = acc.value();
        acc.add(w[n]);
    }
    let n_max = tails
        .iter()
        .position(|&t| t < epsilon_tail)
        .expect("the last tail is zero");
    Ok(Truncation {
        n_max,
        n_photon_cutoff: n_max + BASIS_PAD,
        tail_mass: tails[n_max],
    })
}

/// Field amplitudes over a truncated Fock basis.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PhotonDistribution {
    pub alpha: f64,
    pub r: f64,
    /// Normalizer of the untruncated superposition.
    pub b: f64,
    pub n_max: usize,
    /// Coherent coefficients `q_0..=q_{n_max}`.
    pub q: Vec<f64>,
    /// Renormalized amplitudes `c_0..=c_{n_max}`.
    pub weights: Vec<f64>,
    /// Mass dropped by the truncation before renormalization.
    pub tail_mass: f64,
}

impl PhotonDistribution {
    /// Largest photon number of the composite basis built on this field.
    pub fn n_photon_cutoff(&self) -> usize {
        self.n_max + BASIS_PAD
    }

    /// Amplitude `c_n`, zero beyond the cutoff.
    #[inline]
    pub fn weight(&self, n: usize) -> f64 {
        self.weights.get(n).copied().unwrap_or(0.0)
    }

    pub fn truncation(&self) -> Truncation {
        Truncation {
            n_max: self.n_max,
            n_photon_cutoff: self.n_photon_cutoff(),
            tail_mass: self.tail_mass,
        }
    }

    /// Squared norm of the stored weights.
    pub fn norm_sqr(&self) -> f64 {
        crate::summation::sum(self.weights.iter().map(|w| w * w))
    }
}

/// Build the field distribution for `spec`, truncated by its tail rule (or an
/// explicit cutoff) and renormalized.
pub fn superposed_distribution(spec: &FieldSpec) -> Result<PhotonDistribution> {
    spec.validate()?;
    let (n_max, tail_mass) = match spec.cutoff {
        Some(n_max) => {
            let w = weight_squares(spec.alpha, spec.r)?;
            let tail = crate::summation::sum(w.iter().skip(n_max + 1).copied());
            (n_max, tail)
        }
        None => {
            let t = choose_truncation(spec.alpha, spec.r, spec.epsilon_tail)?;
            (t.n_max, t.tail_mass)
        }
    };
    let b = normalization_b(spec.alpha, spec.r)?;
    let q = coherent_coefficients(spec.alpha, n_max);
    let sqrt_b = b.sqrt();
    let raw: Vec<f64> = q
        .iter()
        .enumerate()
        .map(|(n, &qn)| qn * parity_factor(spec.r, n) / sqrt_b)
        .collect();
    let norm = crate::summation::sum(raw.iter().map(|c| c * c)).sqrt();
    if norm == 0.0 {
        return Err(Error::ZeroState {
            alpha: spec.alpha,
            r: spec.r,
        });
    }
    let weights = raw.iter().map(|c| c / norm).collect();
    Ok(PhotonDistribution {
        alpha: spec.alpha,
        r: spec.r,
        b,
        n_max,
        q,
        weights,
        tail_mass,
    })
}
