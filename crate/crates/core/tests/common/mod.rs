//! Independent reference integrators shared by the integration tests.
#![allow(dead_code)]

use num_complex::Complex64;

use cascade_phase::{Motion, SystemConfig};

/// Dense interaction-picture Hamiltonian on the composite basis with the
/// explicit `e^{±iΔτ}` factors; layout `level * (N + 1) + n`.
pub fn lab_hamiltonian(n_cut: usize, tau: f64, config: &SystemConfig) -> Vec<Vec<Complex64>> {
    let dim = 3 * (n_cut + 1);
    let mut h = vec![vec![Complex64::new(0.0, 0.0); dim]; dim];
    let lam = match config.motion {
        Motion::Moving { p } => (p as f64 * tau).sin(),
        Motion::Neglected => 1.0,
    };
    let phase = Complex64::from_polar(1.0, config.delta * tau);
    let idx = |level: usize, n: usize| level * (n_cut + 1) + n;
    for n in 0..n_cut {
        let c = lam * ((n + 1) as f64).sqrt();
        // a σ12 e^{−iΔτ}: |2, n+1⟩ → |1, n⟩
        h[idx(0, n)][idx(1, n + 1)] = c * phase.conj();
        h[idx(1, n + 1)][idx(0, n)] = c * phase;
        // a σ23 e^{iΔτ}: |3, n+1⟩ → |2, n⟩
        h[idx(1, n)][idx(2, n + 1)] = c * phase;
        h[idx(2, n + 1)][idx(1, n)] = c * phase.conj();
    }
    h
}

fn apply(h: &[Vec<Complex64>], v: &[Complex64]) -> Vec<Complex64> {
    let mi = Complex64::new(0.0, -1.0);
    h.iter()
        .map(|row| mi * row.iter().zip(v).map(|(a, b)| a * b).sum::<Complex64>())
        .collect()
}

fn axpy(a: &[Complex64], s: f64, b: &[Complex64]) -> Vec<Complex64> {
    a.iter().zip(b).map(|(x, y)| x + y * s).collect()
}

/// Classic RK4 on `i dψ/dτ = H_I(τ) ψ` with step at most `h`, sampled on
/// `config.taus()`.
pub fn lab_frame_rk4(initial: &[Complex64], n_cut: usize, config: &SystemConfig, h: f64) -> Vec<Vec<Complex64>> {
    let taus = config.taus();
    let mut psi = initial.to_vec();
    let mut out = vec![psi.clone()];
    for w in taus.windows(2) {
        let steps = ((w[1] - w[0]) / h).ceil() as usize;
        let dt = (w[1] - w[0]) / steps as f64;
        for j in 0..steps {
            let t = w[0] + j as f64 * dt;
            let h0 = lab_hamiltonian(n_cut, t, config);
            let hm = lab_hamiltonian(n_cut, t + 0.5 * dt, config);
            let h1 = lab_hamiltonian(n_cut, t + dt, config);
            let k1 = apply(&h0, &psi);
            let k2 = apply(&hm, &axpy(&psi, 0.5 * dt, &k1));
            let k3 = apply(&hm, &axpy(&psi, 0.5 * dt, &k2));
            let k4 = apply(&h1, &axpy(&psi, dt, &k3));
            for i in 0..psi.len() {
                psi[i] += (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]) * (dt / 6.0);
            }
        }
        out.push(psi.clone());
    }
    out
}
