//! Property-based invariants: reversibility and unitarity of spectral
//! propagation, idempotence of control normalization, exact bilinearity of
//! the Hamiltonian assembly on dyadic rationals, and objective identities.

use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;

use aqc_core::dynamics::{objective, objective_score};
use aqc_core::hamiltonians::{gap_and_ground, hamiltonian_at, landau_zener};
use aqc_core::linalg::{eigh, expectation, step_unitary, HermitianOperator, QuantumState};
use aqc_core::schedules::{constrain, crab_render, CrabParams, GuessEnvelope, Schedule};

fn hermitian_strategy(n: usize) -> impl Strategy<Value = HermitianOperator> {
    proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), n * n).prop_map(move |xs| {
        let a = DMatrix::from_fn(n, n, |i, j| {
            let (re, im) = xs[i * n + j];
            Complex64::new(re, im)
        });
        let h = (&a + a.adjoint()) * Complex64::new(0.5, 0.0);
        HermitianOperator::new(h).expect("symmetrized matrix is Hermitian")
    })
}

fn state_strategy(n: usize) -> impl Strategy<Value = QuantumState> {
    proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), n)
        .prop_filter("nonzero amplitude vector", |xs| {
            xs.iter().map(|(re, im)| re * re + im * im).sum::<f64>() > 1e-6
        })
        .prop_map(|xs| {
            QuantumState::normalized(
                xs.into_iter().map(|(re, im)| Complex64::new(re, im)).collect(),
            )
            .expect("nonzero vector normalizes")
        })
}

/// Raw control tables guaranteed feasible (non-constant on both controls).
fn raw_controls_strategy() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    (3usize..40).prop_flat_map(|len| {
        (
            proptest::collection::vec(-2.0f64..2.0, len),
            proptest::collection::vec(-2.0f64..2.0, len),
        )
            .prop_filter("controls must not be constant", |(u1, u2)| {
                let spread = |v: &[f64]| {
                    let lo = v.iter().cloned().fold(f64::MAX, f64::min);
                    let hi = v.iter().cloned().fold(f64::MIN, f64::max);
                    hi - lo
                };
                spread(u1) > 1e-6 && spread(u2) > 1e-6
            })
    })
}

proptest! {
    #[test]
    fn forward_then_backward_step_is_identity(
        h in hermitian_strategy(4),
        dt in -3.0f64..3.0,
    ) {
        let roundtrip = step_unitary(&h, dt) * step_unitary(&h, -dt);
        for i in 0..4 {
            for j in 0..4 {
                let expect = if i == j { 1.0 } else { 0.0 };
                prop_assert!((roundtrip[(i, j)] - Complex64::new(expect, 0.0)).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn step_unitary_preserves_norm(
        h in hermitian_strategy(4),
        psi in state_strategy(4),
        dt in 0.01f64..3.0,
    ) {
        let u = step_unitary(&h, dt);
        let moved = aqc_core::linalg::apply(&u, &psi).unwrap();
        prop_assert!((moved.norm() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn eigh_reconstructs_and_is_orthonormal(h in hermitian_strategy(4)) {
        let dec = eigh(&h);
        let v = dec.basis();
        let gram = v.adjoint() * v;
        let mut recon = DMatrix::<Complex64>::zeros(4, 4);
        for k in 0..4 {
            let col = v.column(k);
            recon += (col * col.adjoint()) * Complex64::new(dec.eigenvalues()[k], 0.0);
        }
        for i in 0..4 {
            for j in 0..4 {
                let id = if i == j { 1.0 } else { 0.0 };
                prop_assert!((gram[(i, j)] - Complex64::new(id, 0.0)).norm() < 1e-10);
                prop_assert!((recon[(i, j)] - h.entry(i, j)).norm() < 1e-10);
            }
        }
        for w in dec.eigenvalues().windows(2) {
            prop_assert!(w[0] <= w[1]);
        }
    }

    #[test]
    fn expectation_stays_within_spectral_range(
        h in hermitian_strategy(4),
        psi in state_strategy(4),
    ) {
        let dec = eigh(&h);
        let e = expectation(&h, &psi);
        let lo = dec.eigenvalues()[0];
        let hi = dec.eigenvalues()[3];
        prop_assert!(e >= lo - 1e-10 && e <= hi + 1e-10);
    }

    #[test]
    fn constrain_output_is_feasible_and_idempotent((raw1, raw2) in raw_controls_strategy()) {
        let once = constrain(&raw1, &raw2).unwrap();
        let m = once.m();
        prop_assert_eq!(once.u1()[0], 1.0);
        prop_assert_eq!(once.u1()[m], 0.0);
        prop_assert_eq!(once.u2()[0], 0.0);
        prop_assert_eq!(once.u2()[m], 1.0);
        for k in 0..=m {
            prop_assert!((0.0..=1.0).contains(&once.u1()[k]));
            prop_assert!((0.0..=1.0).contains(&once.u2()[k]));
        }
        let twice = constrain(once.u1(), once.u2()).unwrap();
        prop_assert_eq!(once.u1(), twice.u1());
        prop_assert_eq!(once.u2(), twice.u2());
    }

    #[test]
    fn hamiltonian_assembly_is_exactly_bilinear_on_dyadics(
        a in 0u32..32,
        b in 0u32..32,
        c in 0u32..32,
        d in 0u32..32,
    ) {
        // Dyadic rationals k/32 make the distributive law exact in floating
        // point, so the assembled matrices must agree bitwise.
        let p = landau_zener();
        let (u1a, u1b) = (a as f64 / 32.0, b as f64 / 32.0);
        let (u2a, u2b) = (c as f64 / 32.0, d as f64 / 32.0);
        let sum = hamiltonian_at(&p, u1a + u1b, u2a + u2b);
        let parts1 = hamiltonian_at(&p, u1a, u2a);
        let parts2 = hamiltonian_at(&p, u1b, u2b);
        for i in 0..2 {
            for j in 0..2 {
                prop_assert_eq!(sum.entry(i, j), parts1.entry(i, j) + parts2.entry(i, j));
            }
        }
    }

    #[test]
    fn crab_zero_coefficients_render_the_envelope(
        m in 2usize..60,
        omega1 in 1.0f64..20.0,
        omega2 in 1.0f64..20.0,
    ) {
        let params = CrabParams::new(1, vec![0.0, 0.0, omega1, 0.0, 0.0, omega2]).unwrap();
        let env = GuessEnvelope::ramp();
        let (r1, r2) = crab_render(&params, &env, m);
        for k in 0..=m {
            let s = k as f64 / m as f64;
            prop_assert!((r1[k] - (1.0 - s)).abs() < 1e-15);
            prop_assert!((r2[k] - s).abs() < 1e-15);
        }
    }
}

proptest! {
    // Propagation-backed properties run fewer, smaller cases.
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn objective_identity_and_fidelity_bounds(
        m in 4usize..16,
        t in 0.2f64..6.0,
        alpha in 0.0f64..1.0,
    ) {
        let p = landau_zener();
        let sch = Schedule::new(
            (0..=m).map(|k| 1.0 - k as f64 / m as f64).collect(),
            (0..=m).map(|k| k as f64 / m as f64).collect(),
        )
        .unwrap();
        let report = objective(&p, &sch, t, alpha).unwrap();
        prop_assert_eq!(report.f, report.f1 + alpha * report.f2);
        prop_assert!((0.0..=1.0 + 1e-10).contains(&report.f1));
        let target = gap_and_ground(p.h_p()).ground_state;
        let score = objective_score(&p, &sch, t, alpha, &target).unwrap();
        prop_assert_eq!(score.f, report.f);
        prop_assert_eq!(score.f1, report.f1);
        prop_assert_eq!(score.f2, report.f2);
    }
}
