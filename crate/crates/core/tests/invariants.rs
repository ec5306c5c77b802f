use std::f64::consts::{PI, TAU};

use proptest::prelude::*;

use cascade_phase::analytic::overlap_xy;
use cascade_phase::evolver;
use cascade_phase::field::{coherent_coefficients, normalization_b, superposed_distribution, FieldSpec};
use cascade_phase::observables;
use cascade_phase::system::{build_blocks, initial_state, Level};
use cascade_phase::{Motion, SystemConfig};

fn motion() -> impl Strategy<Value = Motion> {
    prop_oneof![(1u32..4).prop_map(|p| Motion::Moving { p }), Just(Motion::Neglected)]
}

fn field() -> impl Strategy<Value = FieldSpec> {
    (0.2f64..8.0, -2.0f64..2.0).prop_map(|(a, r)| FieldSpec::new(a, r))
}

fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        s += f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * h / 3.0
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn distributions_are_normalized(spec in field()) {
        let d = superposed_distribution(&spec).unwrap();
        prop_assert!((d.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn parity_purity(alpha in 0.2f64..8.0, even in any::<bool>()) {
        let r = if even { 1.0 } else { -1.0 };
        let d = superposed_distribution(&FieldSpec::new(alpha, r)).unwrap();
        for (n, w) in d.weights.iter().enumerate() {
            if (n % 2 == 1) == even {
                prop_assert_eq!(*w, 0.0);
            }
        }
    }

    #[test]
    fn truncation_is_monotone(spec in field(), extra in 1usize..40) {
        let d = superposed_distribution(&spec).unwrap();
        let longer = coherent_coefficients(spec.alpha, d.n_max + extra);
        prop_assert_eq!(&longer[..=d.n_max], &d.q[..]);
        let b = normalization_b(spec.alpha, spec.r).unwrap();
        for (n, w) in d.weights.iter().enumerate() {
            let raw = d.q[n] * (1.0 + spec.r * if n % 2 == 0 { 1.0 } else { -1.0 }) / b.sqrt();
            if raw != 0.0 {
                prop_assert!((w / raw - 1.0).abs() < spec.epsilon_tail);
            }
        }
    }

    #[test]
    fn pulse_area_is_the_antiderivative(tau in 0.0f64..30.0, m in motion()) {
        let q = simpson(|t| m.shape(t), 0.0, tau, 40_000);
        prop_assert!((m.pulse_area(tau) - q).abs() < 1e-10);
        let a = tau * 0.3;
        prop_assert!((m.step_area(a, tau) - (m.pulse_area(tau) - m.pulse_area(a))).abs() < 1e-12);
    }

    #[test]
    fn initial_state_norm(spec in field(), theta in -PI..PI) {
        let cfg = SystemConfig::new(spec, theta, 0.0, Motion::Neglected);
        let psi = initial_state(&cfg, &superposed_distribution(&spec).unwrap());
        prop_assert!((psi.norm_sqr() - 1.0).abs() < 1e-12);
        prop_assert!(psi.level(Level::Ground).iter().all(|a| a.re == 0.0 && a.im == 0.0));
    }

    #[test]
    fn blocks_partition_the_basis(n_cut in 2usize..60) {
        let blocks = build_blocks(n_cut).unwrap();
        let mut seen = vec![0u8; 3 * (n_cut + 1)];
        for b in &blocks {
            prop_assert!(b.couplings.iter().all(|&c| c > 0.0));
            for e in &b.basis {
                seen[e.level.index() * (n_cut + 1) + e.photons] += 1;
            }
        }
        prop_assert!(seen.iter().all(|&c| c == 1));
    }

    #[test]
    fn analytic_overlap_in_unit_disk(spec in field(), theta in -PI..PI, m in motion(), tau in 0.0f64..40.0) {
        let cfg = SystemConfig::new(spec, theta, 0.0, m);
        let d = superposed_distribution(&spec).unwrap();
        let v = overlap_xy(tau, &cfg, &d).unwrap();
        prop_assert!(v.x * v.x + v.y * v.y <= 1.0 + 1e-9);
    }

    #[test]
    fn analytic_overlap_is_periodic(spec in field(), theta in -PI..PI, p in 1u32..4, tau in 0.0f64..10.0) {
        let m = Motion::Moving { p };
        let cfg = SystemConfig::new(spec, theta, 0.0, m);
        let d = superposed_distribution(&spec).unwrap();
        let a = overlap_xy(tau, &cfg, &d).unwrap();
        let b = overlap_xy(tau + TAU / p as f64, &cfg, &d).unwrap();
        prop_assert!((a.x - b.x).abs() < 1e-12 && (a.y - b.y).abs() < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn phase_series_invariants(
        alpha in 0.3f64..4.0,
        r in -1.5f64..1.5,
        theta in -PI..PI,
        delta in prop_oneof![Just(0.0), -20.0f64..20.0],
        m in motion(),
    ) {
        let spec = FieldSpec::new(alpha, r);
        let cfg = SystemConfig::new(spec, theta, delta, m).with_grid(6.0, 61);
        let d = superposed_distribution(&spec).unwrap();
        let traj = evolver::evolve(&initial_state(&cfg, &d), &cfg).unwrap();
        let s = observables::series_from_trajectory(&traj).unwrap();
        for rec in &s.records {
            let p = rec.populations.unwrap();
            prop_assert!((p[0] + p[1] + p[2] - 1.0).abs() < 1e-9);
            prop_assert!(rec.x * rec.x + rec.y * rec.y <= 1.0 + 1e-9);
            prop_assert!(rec.norm_error.unwrap() < 1e-9);
            if let Some(phi) = rec.phi_pancharatnam {
                prop_assert!(phi > -PI && phi <= PI);
            }
            if let Some(phi) = rec.phi_eq5 {
                prop_assert!(phi.abs() <= PI / 2.0);
            }
            if let Some(phi) = rec.phi_geometric {
                prop_assert!(phi > -PI && phi <= PI);
            }
        }
    }
}
