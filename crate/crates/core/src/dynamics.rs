//! Piecewise-constant Schrödinger propagation under a control schedule
//! and evaluation of the multiobjective functional `F = F1 + α·F2`.
//!
//! The state advances through `M` slices with exact spectral propagators
//! `U_k = exp(−i·H(ū1_k, ū2_k)·T/M)`, where `ū_l_k` is the midpoint
//! average of the grid-point controls over slice `k`. The energy term
//! `F2 = −(1/T)·∫⟨ψ|H|ψ⟩dt` uses the trapezoidal rule over grid points
//! with grid-point control values; both choices are second-order in `1/M`
//! while keeping the [`Schedule`] as the single source of truth.

use std::io::Write;

use crate::hamiltonians::{gap_and_ground, hamiltonian_at, AdiabaticProblem, DEGENERACY_TOL};
use crate::linalg::{apply, eigh, expectation, inner, step_unitary, QuantumState};
use crate::schedules::Schedule;
use crate::{Error, Result};

/// States at the `M + 1` grid times `t_k = (k/M)·T` of one propagation.
#[derive(Debug, Clone)]
pub struct Trajectory {
    states: Vec<QuantumState>,
    t_total: f64,
}

impl Trajectory {
    /// Wraps externally produced states (primarily for diagnostics and
    /// tests); validates the shape.
    pub fn from_states(states: Vec<QuantumState>, t_total: f64) -> Result<Self> {
        if states.len() < 3 {
            return Err(Error::InvalidState(format!(
                "trajectory needs at least 3 states, got {}",
                states.len()
            )));
        }
        if !(t_total > 0.0) || !t_total.is_finite() {
            return Err(Error::NonPositiveDuration { t: t_total });
        }
        Ok(Self { states, t_total })
    }

    /// States at the grid times, `states()[k] = ψ(t_k)`.
    pub fn states(&self) -> &[QuantumState] {
        &self.states
    }

    /// The final state `ψ(T)`.
    pub fn final_state(&self) -> &QuantumState {
        self.states.last().expect("trajectory is never empty")
    }

    /// Total adiabatic duration `T`.
    pub fn t_total(&self) -> f64 {
        self.t_total
    }
}

/// Scores of one propagated schedule: the functional and its two terms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObjectiveScore {
    /// `F = F1 + α·F2`.
    pub f: f64,
    /// Target-state fidelity `F1 ∈ [0, 1]`.
    pub f1: f64,
    /// Negated time-averaged energy expectation.
    pub f2: f64,
}

/// Full evaluation of one schedule: scores plus diagnostic traces on the
/// grid.
#[derive(Debug, Clone)]
pub struct ObjectiveReport {
    /// `F = F1 + α·F2`, exact by construction.
    pub f: f64,
    /// Target-state fidelity.
    pub f1: f64,
    /// Negated time-averaged energy expectation.
    pub f2: f64,
    /// The weight α the report was evaluated under.
    pub alpha: f64,
    /// Instantaneous ground-state population at each grid point.
    pub p0_trace: Vec<f64>,
    /// Instantaneous gap `E_1 − E_0` at each grid point's control values.
    pub gap_trace: Vec<f64>,
    /// Energy expectation `⟨ψ|H⟩` at each grid point's control values.
    pub energy_trace: Vec<f64>,
}

impl ObjectiveReport {
    /// Writes the diagnostic traces as CSV with header
    /// `s,P0,gap,energy_expectation`.
    pub fn write_trace_csv<W: Write>(&self, w: &mut W) -> std::io::Result<()> {
        writeln!(w, "s,P0,gap,energy_expectation")?;
        let m = self.p0_trace.len() - 1;
        for k in 0..=m {
            writeln!(
                w,
                "{},{},{},{}",
                k as f64 / m as f64,
                self.p0_trace[k],
                self.gap_trace[k],
                self.energy_trace[k]
            )?;
        }
        Ok(())
    }
}

/// Trapezoid weight for grid point `k` of `0..=m`.
pub(crate) fn trapezoid_weight(k: usize, m: usize) -> f64 {
    if k == 0 || k == m {
        0.5
    } else {
        1.0
    }
}

/// Runs the slice-by-slice propagation, invoking `visit(k, ψ_k)` for every
/// grid point including the initial one. Single source of truth for the
/// propagation arithmetic, shared by [`propagate`] and [`objective_score`]
/// so both produce bitwise-identical states.
fn fold_states(
    p: &AdiabaticProblem,
    sch: &Schedule,
    t: f64,
    mut visit: impl FnMut(usize, &QuantumState),
) -> Result<()> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::NonPositiveDuration { t });
    }
    let start = gap_and_ground(p.h_i());
    if start.degenerate {
        return Err(Error::DegenerateGround {
            gap: start.gap,
            context: "H_I at propagation start".into(),
        });
    }
    let m = sch.m();
    let dt = t / m as f64;
    let mut psi = start.ground_state;
    visit(0, &psi);
    for k in 0..m {
        let h = hamiltonian_at(p, sch.u1_mid(k), sch.u2_mid(k));
        let u = step_unitary(&h, dt);
        psi = apply(&u, &psi).expect("propagator dimension matches the state");
        visit(k + 1, &psi);
    }
    Ok(())
}

/// Propagates the ground state of `H_I` under the schedule for total time
/// `T`, returning all intermediate states.
pub fn propagate(p: &AdiabaticProblem, sch: &Schedule, t: f64) -> Result<Trajectory> {
    let mut states = Vec::with_capacity(sch.m() + 1);
    fold_states(p, sch, t, |_, psi| states.push(psi.clone()))?;
    Trajectory::from_states(states, t)
}

/// Target-state fidelity `F1 = |⟨φ0(T)|ψ(T)⟩|²`, the squared overlap of
/// the final state with the ground state of `H_P`.
pub fn fidelity_f1(traj: &Trajectory, p: &AdiabaticProblem) -> f64 {
    let target = gap_and_ground(p.h_p()).ground_state;
    inner(&target, traj.final_state()).norm_sqr()
}

/// Negated time-averaged energy `F2 = −(1/T)·∫₀ᵀ⟨ψ(t)|H(t)|ψ(t)⟩dt`,
/// evaluated by the trapezoidal rule over grid points with grid-point
/// control values. The `1/T` average cancels the `T/M` measure, so the
/// value depends on `T` only through the trajectory itself.
pub fn energy_f2(traj: &Trajectory, p: &AdiabaticProblem, sch: &Schedule, _t: f64) -> f64 {
    let m = sch.m();
    let mut acc = 0.0;
    for (k, psi) in traj.states().iter().enumerate() {
        let h = hamiltonian_at(p, sch.u1()[k], sch.u2()[k]);
        acc += trapezoid_weight(k, m) * expectation(&h, psi);
    }
    -acc / m as f64
}

/// Scores a schedule without materializing the trajectory or traces: the
/// hot path for population-based optimization. `target` is the ground
/// state of `H_P`, precomputed once by the caller.
pub fn objective_score(
    p: &AdiabaticProblem,
    sch: &Schedule,
    t: f64,
    alpha: f64,
    target: &QuantumState,
) -> Result<ObjectiveScore> {
    let m = sch.m();
    let mut energy_acc = 0.0;
    let mut overlap = num_complex::Complex64::new(0.0, 0.0);
    fold_states(p, sch, t, |k, psi| {
        let h = hamiltonian_at(p, sch.u1()[k], sch.u2()[k]);
        energy_acc += trapezoid_weight(k, m) * expectation(&h, psi);
        if k == m {
            overlap = inner(target, psi);
        }
    })?;
    let f1 = overlap.norm_sqr();
    let f2 = -energy_acc / m as f64;
    Ok(ObjectiveScore {
        f: f1 + alpha * f2,
        f1,
        f2,
    })
}

/// Instantaneous ground-state population `P0(s_k) = |⟨φ0(s_k)|ψ(s_k)⟩|²`
/// at each grid point. Under ground-level degeneracy (gap below 1e-9) the
/// population is the squared norm of the projection onto the full
/// degenerate ground subspace, the unique basis-independent extension.
pub fn ground_population_trace(
    traj: &Trajectory,
    p: &AdiabaticProblem,
    sch: &Schedule,
) -> Vec<f64> {
    traj.states()
        .iter()
        .enumerate()
        .map(|(k, psi)| {
            let h = hamiltonian_at(p, sch.u1()[k], sch.u2()[k]);
            let dec = eigh(&h);
            let e0 = dec.eigenvalues()[0];
            let mut pop = 0.0;
            for j in 0..dec.dim() {
                if dec.eigenvalues()[j] - e0 >= DEGENERACY_TOL && j > 0 {
                    break;
                }
                pop += inner(&dec.eigenvector(j), psi).norm_sqr();
            }
            pop
        })
        .collect()
}

/// Gap `E_1 − E_0` at each grid point's control values.
pub fn gap_trace(p: &AdiabaticProblem, sch: &Schedule) -> Vec<f64> {
    (0..=sch.m())
        .map(|k| {
            let h = hamiltonian_at(p, sch.u1()[k], sch.u2()[k]);
            let dec = eigh(&h);
            dec.eigenvalues()[1] - dec.eigenvalues()[0]
        })
        .collect()
}

/// Energy expectation `⟨ψ(s_k)|H(s_k)|ψ(s_k)⟩` at each grid point.
pub fn energy_trace(traj: &Trajectory, p: &AdiabaticProblem, sch: &Schedule) -> Vec<f64> {
    traj.states()
        .iter()
        .enumerate()
        .map(|(k, psi)| {
            let h = hamiltonian_at(p, sch.u1()[k], sch.u2()[k]);
            expectation(&h, psi)
        })
        .collect()
}

/// Propagates once and fills the full report: scores and all traces.
pub fn objective(
    p: &AdiabaticProblem,
    sch: &Schedule,
    t: f64,
    alpha: f64,
) -> Result<ObjectiveReport> {
    let traj = propagate(p, sch, t)?;
    let f1 = fidelity_f1(&traj, p);
    let f2 = energy_f2(&traj, p, sch, t);
    Ok(ObjectiveReport {
        f: f1 + alpha * f2,
        f1,
        f2,
        alpha,
        p0_trace: ground_population_trace(&traj, p, sch),
        gap_trace: gap_trace(p, sch),
        energy_trace: energy_trace(&traj, p, sch),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonians::{grover, landau_zener};
    use crate::schedules::linear;

    /// A schedule frozen at constant control values; bypasses the boundary
    /// pins deliberately (diagnostic use of `from_raw`).
    fn frozen(m: usize, u1: f64, u2: f64) -> Schedule {
        Schedule::from_raw(vec![u1; m + 1], vec![u2; m + 1]).unwrap()
    }

    #[test]
    fn eigenstate_frozen_evolution_keeps_population_one() {
        let p = landau_zener();
        let sch = frozen(40, 1.0, 0.0);
        let traj = propagate(&p, &sch, 2.3).unwrap();
        let p0 = ground_population_trace(&traj, &p, &sch);
        for (k, v) in p0.iter().enumerate() {
            assert!((v - 1.0).abs() < 1e-10, "P0[{k}] = {v}");
        }
        // Final state is |1⟩ up to a global phase.
        let fin = traj.final_state();
        assert!((fin.amp(1).norm() - 1.0).abs() < 1e-10);
        assert!(fin.amp(0).norm() < 1e-10);
    }

    #[test]
    fn adiabatic_limit_reaches_target() {
        let p = landau_zener();
        let sch = linear(100).unwrap();
        let traj = propagate(&p, &sch, 100.0).unwrap();
        let f1 = fidelity_f1(&traj, &p);
        assert!(f1 > 0.999, "F1 = {f1}");
        let p0 = ground_population_trace(&traj, &p, &sch);
        let min = p0.iter().cloned().fold(f64::INFINITY, f64::min);
        assert!(min > 0.99, "min P0 = {min}");
    }

    #[test]
    fn propagation_self_converges_on_fine_grid() {
        let p = grover(2, 0).unwrap();
        let coarse = linear(100).unwrap();
        let fine = linear(10_000).unwrap();
        let f1_coarse = fidelity_f1(&propagate(&p, &coarse, 3.0).unwrap(), &p);
        let f1_fine = fidelity_f1(&propagate(&p, &fine, 3.0).unwrap(), &p);
        assert!(
            (f1_coarse - f1_fine).abs() < 1e-4,
            "coarse {f1_coarse} vs fine {f1_fine}"
        );
    }

    #[test]
    fn fidelity_extremes() {
        let p = landau_zener();
        let target = gap_and_ground(p.h_p()).ground_state;
        let dec = eigh(p.h_p());
        let excited = dec.eigenvector(1);

        let hit = Trajectory::from_states(vec![target.clone(), target.clone(), target], 1.0).unwrap();
        assert!((fidelity_f1(&hit, &p) - 1.0).abs() < 1e-12);

        let miss = Trajectory::from_states(vec![excited.clone(), excited.clone(), excited], 1.0).unwrap();
        assert!(fidelity_f1(&miss, &p) < 1e-12);
    }

    #[test]
    fn frozen_ground_energy_term_is_plus_one() {
        // ⟨ψ|H⟩ ≡ −1 along the frozen σz evolution, so F2 = +1.
        let p = landau_zener();
        let sch = frozen(25, 1.0, 0.0);
        let traj = propagate(&p, &sch, 1.7).unwrap();
        let f2 = energy_f2(&traj, &p, &sch, 1.7);
        assert!((f2 - 1.0).abs() < 1e-10, "F2 = {f2}");
    }

    #[test]
    fn energy_term_of_instantaneous_ground_tracks_e0() {
        // A trajectory pinned to the instantaneous ground state has
        // F2 = −(1/M)·Σ w_k·E_0(s_k).
        let p = grover(2, 0).unwrap();
        let sch = linear(40).unwrap();
        let states: Vec<QuantumState> = (0..=40)
            .map(|k| {
                let h = hamiltonian_at(&p, sch.u1()[k], sch.u2()[k]);
                gap_and_ground(&h).ground_state
            })
            .collect();
        let traj = Trajectory::from_states(states, 5.0).unwrap();
        let f2 = energy_f2(&traj, &p, &sch, 5.0);
        let mut expect = 0.0;
        for k in 0..=40 {
            let h = hamiltonian_at(&p, sch.u1()[k], sch.u2()[k]);
            expect += trapezoid_weight(k, 40) * eigh(&h).eigenvalues()[0];
        }
        expect = -expect / 40.0;
        assert!((f2 - expect).abs() < 1e-12);
    }

    #[test]
    fn objective_with_zero_weight_equals_fidelity() {
        let p = landau_zener();
        let sch = linear(50).unwrap();
        let report = objective(&p, &sch, 3.0, 0.0).unwrap();
        assert_eq!(report.f, report.f1);
        assert!(report.f1 > 0.0 && report.f1 <= 1.0 + 1e-10);
    }

    #[test]
    fn report_identity_and_population_endpoint() {
        let p = landau_zener();
        let sch = linear(50).unwrap();
        let alpha = 0.37;
        let report = objective(&p, &sch, 3.0, alpha).unwrap();
        assert_eq!(report.f, report.f1 + alpha * report.f2);
        // P0 starts at 1 and its endpoint coincides with F1 by definition.
        assert!((report.p0_trace[0] - 1.0).abs() < 1e-12);
        assert!((report.p0_trace[50] - report.f1).abs() < 1e-12);
        for &v in &report.p0_trace {
            assert!((-1e-10..=1.0 + 1e-10).contains(&v));
        }
    }

    #[test]
    fn score_path_matches_full_report_bitwise() {
        let p = landau_zener();
        let sch = linear(64).unwrap();
        let target = gap_and_ground(p.h_p()).ground_state;
        let score = objective_score(&p, &sch, 3.0, 0.25, &target).unwrap();
        let report = objective(&p, &sch, 3.0, 0.25).unwrap();
        assert_eq!(score.f1, report.f1);
        assert_eq!(score.f2, report.f2);
        assert_eq!(score.f, report.f);
    }

    #[test]
    fn gap_trace_matches_closed_forms() {
        let p = landau_zener();
        let sch = linear(100).unwrap();
        let gaps = gap_trace(&p, &sch);
        assert!((gaps[0] - 2.0).abs() < 1e-12);
        assert!((gaps[50] - 2.0_f64.sqrt()).abs() < 1e-12);

        // Grover n=4 linear: minimum over the grid sits at s = 1/2 with
        // the closed-form value 1/√N = 1/4.
        let g = grover(4, 0).unwrap();
        let gaps = gap_trace(&g, &sch);
        let min = gaps.iter().cloned().fold(f64::INFINITY, f64::min);
        assert!((min - 0.25).abs() < 1e-10, "min gap {min}");
    }

    #[test]
    fn norm_is_conserved_along_propagation() {
        let p = grover(3, 0).unwrap();
        let sch = linear(80).unwrap();
        let traj = propagate(&p, &sch, 7.0).unwrap();
        for psi in traj.states() {
            assert!((psi.norm() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn reversed_inverse_steps_return_to_start() {
        let p = landau_zener();
        let sch = linear(50).unwrap();
        let t = 2.0;
        let traj = propagate(&p, &sch, t).unwrap();
        let dt = t / 50.0;
        let mut psi = traj.final_state().clone();
        for k in (0..50).rev() {
            let h = hamiltonian_at(&p, sch.u1_mid(k), sch.u2_mid(k));
            let u_inv = step_unitary(&h, -dt);
            psi = apply(&u_inv, &psi).unwrap();
        }
        let start = traj.states()[0].clone();
        for i in 0..2 {
            assert!((psi.amp(i) - start.amp(i)).norm() < 1e-8);
        }
    }

    #[test]
    fn fully_degenerate_hamiltonian_projects_onto_whole_space() {
        // Frozen zero controls make H ≡ 0: every level is degenerate, so
        // the ground-subspace projection captures the full norm.
        let p = landau_zener();
        let sch = frozen(10, 0.0, 0.0);
        let traj = propagate(&p, &sch, 1.0).unwrap();
        let p0 = ground_population_trace(&traj, &p, &sch);
        for v in p0 {
            assert!((v - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn propagate_rejects_bad_duration() {
        let p = landau_zener();
        let sch = linear(10).unwrap();
        assert!(matches!(
            propagate(&p, &sch, 0.0),
            Err(Error::NonPositiveDuration { .. })
        ));
        assert!(matches!(
            propagate(&p, &sch, f64::NAN),
            Err(Error::NonPositiveDuration { .. })
        ));
    }

    #[test]
    fn trace_csv_has_expected_header_and_rows() {
        let p = landau_zener();
        let sch = linear(4).unwrap();
        let report = objective(&p, &sch, 1.0, 0.1).unwrap();
        let mut buf = Vec::new();
        report.write_trace_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "s,P0,gap,energy_expectation");
        assert_eq!(lines.len(), 6);
        assert!(lines[1].starts_with("0,1,2,"));
    }
}
