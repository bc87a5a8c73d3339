//! Search for optimal adiabatic quantum pathways.
//!
//! The library models a two-term control Hamiltonian
//! `H(t) = u1(t)·H_I + u2(t)·H_P` that steers a quantum state from the
//! ground state of an initial Hamiltonian `H_I` to the ground state of a
//! problem Hamiltonian `H_P` over a total time `T`. Controls live on a
//! uniform scaled-time grid `s = t/T ∈ [0, 1]`, are bounded in `[0, 1]`,
//! and satisfy the boundary conditions `u1(0) = u2(T) = 1`,
//! `u1(T) = u2(0) = 0`.
//!
//! Pathways are scored by the multiobjective functional
//! `F = F1 + α·F2`, where `F1` is the squared overlap of the final state
//! with the target ground state and `F2` is the negated time-averaged
//! energy expectation along the trajectory.
//!
//! Modules:
//! - [`linalg`] — dense complex Hermitian eigendecomposition, spectral
//!   propagators, states and overlaps (dimensions up to 64).
//! - [`hamiltonians`] — the Landau-Zener and Grover-search problem
//!   families plus instantaneous gap diagnostics.
//! - [`schedules`] — Linear, Roland-Cerf, and CRAB-parametrized control
//!   schedules with amplitude and boundary constraints.
//! - [`dynamics`] — piecewise-constant Schrödinger propagation and
//!   evaluation of `F`, `F1`, `F2`, and diagnostic traces.
//! - [`de`] — differential evolution (DE/best/2 with binomial crossover)
//!   over CRAB coefficients.
//! - [`dmorph`] — gradient-flow baseline with exact discrete adjoint
//!   gradients and backtracking step-size control.

#![forbid(unsafe_code)]

pub mod de;
pub mod dmorph;
pub mod dynamics;
pub mod error;
pub mod hamiltonians;
pub mod linalg;
pub mod schedules;

pub use error::Error;

/// Convenience result alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
