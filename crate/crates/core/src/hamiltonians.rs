//! Problem families for adiabatic pathway search and instantaneous
//! spectral diagnostics of the controlled Hamiltonian
//! `H(u1, u2) = u1·H_I + u2·H_P`.
//!
//! Two families are provided: the single-qubit Landau-Zener pair
//! `(σz, σx)` and the Grover-search pair built from rank-one projectors
//! onto the uniform superposition and the marked element. The Grover
//! dynamics stays inside `span{|m⟩, |φ⟩}` for every control pair, which
//! [`grover_reduced`] exploits as an explicit 2×2 fast path.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::linalg::{eigh, HermitianOperator, QuantumState};
use crate::{Error, Result};

/// Eigenvalue separation below which a level pair counts as degenerate.
pub const DEGENERACY_TOL: f64 = 1e-9;

/// A pair of Hermitian operators `(H_I, H_P)` defining the controlled
/// Hamiltonian, together with the qubit count of its Hilbert space.
#[derive(Debug, Clone)]
pub struct AdiabaticProblem {
    n: usize,
    h_i: HermitianOperator,
    h_p: HermitianOperator,
    label: String,
}

impl AdiabaticProblem {
    /// Validates dimensions (both operators N×N with N = 2^n) and
    /// nondegeneracy of the ground states of `H_I` and `H_P`.
    pub fn new(
        n: usize,
        h_i: HermitianOperator,
        h_p: HermitianOperator,
        label: impl Into<String>,
    ) -> Result<Self> {
        if n < 1 {
            return Err(Error::InvalidConfig("qubit count must be >= 1".into()));
        }
        let dim = 1usize << n;
        for (name, op) in [("H_I", &h_i), ("H_P", &h_p)] {
            if op.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: op.dim(),
                });
            }
            let report = gap_and_ground(op);
            if report.degenerate {
                return Err(Error::DegenerateGround {
                    gap: report.gap,
                    context: format!("{name} ground state at construction"),
                });
            }
        }
        Ok(Self {
            n,
            h_i,
            h_p,
            label: label.into(),
        })
    }

    /// Qubit count of this Hamiltonian pair (Hilbert dimension is `2^n`).
    pub fn n(&self) -> usize {
        self.n
    }

    /// Hilbert-space dimension `N = 2^n`.
    pub fn dim(&self) -> usize {
        1usize << self.n
    }

    /// The initial Hamiltonian whose ground state is the start of every
    /// pathway.
    pub fn h_i(&self) -> &HermitianOperator {
        &self.h_i
    }

    /// The problem Hamiltonian whose ground state encodes the target.
    pub fn h_p(&self) -> &HermitianOperator {
        &self.h_p
    }

    /// Identifying string used in logs and output metadata.
    pub fn label(&self) -> &str {
        &self.label
    }
}

/// Gap and ground-state report for one Hermitian operator.
#[derive(Debug, Clone)]
pub struct GapReport {
    /// `g = E_1 − E_0`, nonnegative.
    pub gap: f64,
    /// Phase-convention representative of the lowest eigenvector. Under
    /// degeneracy callers must project onto the full ground subspace
    /// instead of using this single vector.
    pub ground_state: QuantumState,
    /// True iff `gap` is below [`DEGENERACY_TOL`].
    pub degenerate: bool,
}

/// The Landau-Zener problem: `H_I = σz`, `H_P = σx` on one qubit.
pub fn landau_zener() -> AdiabaticProblem {
    let c = |re: f64| Complex64::new(re, 0.0);
    let sigma_z =
        HermitianOperator::from_rows(2, &[c(1.0), c(0.0), c(0.0), c(-1.0)]).expect("sigma_z");
    let sigma_x =
        HermitianOperator::from_rows(2, &[c(0.0), c(1.0), c(1.0), c(0.0)]).expect("sigma_x");
    AdiabaticProblem::new(1, sigma_z, sigma_x, "landau-zener")
        .expect("Landau-Zener endpoints are nondegenerate")
}

/// The Grover-search problem on `n` qubits with marked basis index `m`:
/// `H_I = I − |φ⟩⟨φ|` (φ the uniform superposition), `H_P = I − |m⟩⟨m|`.
pub fn grover(n: usize, m: usize) -> Result<AdiabaticProblem> {
    if n < 1 {
        return Err(Error::InvalidConfig("qubit count must be >= 1".into()));
    }
    let dim = 1usize << n;
    if m >= dim {
        return Err(Error::MarkedIndexOutOfRange { m, dim });
    }
    // I − |φ⟩⟨φ| has entries δ_ij − 1/N (the uniform projector is real).
    let inv_n = 1.0 / dim as f64;
    let h_i = DMatrix::from_fn(dim, dim, |i, j| {
        let diag = if i == j { 1.0 } else { 0.0 };
        Complex64::new(diag - inv_n, 0.0)
    });
    let h_p = DMatrix::from_fn(dim, dim, |i, j| {
        let v = if i == j && i != m { 1.0 } else { 0.0 };
        Complex64::new(v, 0.0)
    });
    AdiabaticProblem::new(
        n,
        HermitianOperator::new(h_i)?,
        HermitianOperator::new(h_p)?,
        format!("grover-n{n}-m{m}"),
    )
}

/// The 2×2 effective Grover problem in the invariant subspace
/// `span{|m⟩, |φ⊥⟩}`, where `|φ⊥⟩` is the component of the uniform
/// superposition orthogonal to the marked state.
///
/// Both `H_I` and `H_P` preserve this span regardless of the control
/// values, so any pathway propagated here reproduces all overlaps and
/// gaps of the full `2^n`-dimensional problem exactly (the orthogonal
/// complement only carries the flat level `u1 + u2`, which never dips
/// below the two subspace levels for nonnegative controls).
///
/// The returned problem's own qubit count is 1 (its Hilbert dimension
/// is 2); the label records the originating `n`.
pub fn grover_reduced(n: usize) -> Result<AdiabaticProblem> {
    if n < 1 {
        return Err(Error::InvalidConfig("qubit count must be >= 1".into()));
    }
    let big_n = (1usize << n) as f64;
    let c = |re: f64| Complex64::new(re, 0.0);
    // Basis: e0 = |m⟩, e1 = |φ⊥⟩. In it, |φ⟩ = (1/√N, √(N−1)/√N).
    let off = -(big_n - 1.0).sqrt() / big_n;
    let h_i = HermitianOperator::from_rows(
        2,
        &[c(1.0 - 1.0 / big_n), c(off), c(off), c(1.0 / big_n)],
    )?;
    let h_p = HermitianOperator::from_rows(2, &[c(0.0), c(0.0), c(0.0), c(1.0)])?;
    AdiabaticProblem::new(1, h_i, h_p, format!("grover-reduced-n{n}"))
}

/// The controlled Hamiltonian `u1·H_I + u2·H_P` at one pair of control
/// values. Each entry is evaluated as the single expression
/// `u1·a + u2·b` so bilinearity holds with a fixed evaluation order.
pub fn hamiltonian_at(p: &AdiabaticProblem, u1: f64, u2: f64) -> HermitianOperator {
    debug_assert!(u1.is_finite() && u2.is_finite(), "controls must be finite");
    let dim = p.dim();
    let a = p.h_i.matrix();
    let b = p.h_p.matrix();
    let cu1 = Complex64::new(u1, 0.0);
    let cu2 = Complex64::new(u2, 0.0);
    let mat = DMatrix::from_fn(dim, dim, |i, j| cu1 * a[(i, j)] + cu2 * b[(i, j)]);
    HermitianOperator::new(mat).expect("real combination of Hermitian operators is Hermitian")
}

/// Gap `E_1 − E_0` and ground state of one Hermitian operator, with a
/// degeneracy flag at tolerance [`DEGENERACY_TOL`].
pub fn gap_and_ground(h: &HermitianOperator) -> GapReport {
    let dec = eigh(h);
    let gap = dec.eigenvalues()[1] - dec.eigenvalues()[0];
    GapReport {
        gap,
        ground_state: dec.eigenvector(0),
        degenerate: gap < DEGENERACY_TOL,
    }
}
