//! Dense complex linear algebra for Hermitian operators and state vectors.
//!
//! Dimensions stay small (N ≤ 64, i.e. at most six qubits), so everything
//! is dense and exact spectral methods are used throughout: propagators are
//! computed as `V·exp(−i·diag(E)·dt)·V†` rather than by ODE stepping, which
//! removes integrator-order error as a confound when comparing optimizers.
//!
//! All values are immutable after construction and safe to share across
//! concurrent evaluators.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::{Error, Result};

/// Tolerance for the Hermiticity check at operator construction.
pub const HERMITICITY_TOL: f64 = 1e-12;

/// Tolerance for the unit-norm check at state construction.
pub const NORM_TOL: f64 = 1e-10;

/// Threshold below which an eigenvector component is treated as zero when
/// fixing the deterministic phase convention.
const PHASE_TOL: f64 = 1e-12;

/// A normalized complex amplitude vector of power-of-two dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState {
    amps: DVector<Complex64>,
}

impl QuantumState {
    /// Builds a state from raw amplitudes, validating unit norm and
    /// power-of-two dimension.
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        let n = amplitudes.len();
        if n < 2 || !n.is_power_of_two() {
            return Err(Error::InvalidState(format!(
                "dimension {n} is not a power of two >= 2"
            )));
        }
        let amps = DVector::from_vec(amplitudes);
        let norm = amps.norm();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidState(format!(
                "norm {norm} deviates from 1 by more than {NORM_TOL:e}"
            )));
        }
        Ok(Self { amps })
    }

    /// Builds a state by normalizing arbitrary nonzero amplitudes.
    pub fn normalized(amplitudes: Vec<Complex64>) -> Result<Self> {
        let n = amplitudes.len();
        if n < 2 || !n.is_power_of_two() {
            return Err(Error::InvalidState(format!(
                "dimension {n} is not a power of two >= 2"
            )));
        }
        let mut amps = DVector::from_vec(amplitudes);
        let norm = amps.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::InvalidState(format!(
                "cannot normalize vector with norm {norm}"
            )));
        }
        amps /= Complex64::new(norm, 0.0);
        Ok(Self { amps })
    }

    /// The computational basis state `|index⟩` of the given dimension.
    pub fn basis_state(dim: usize, index: usize) -> Result<Self> {
        if index >= dim {
            return Err(Error::InvalidState(format!(
                "basis index {index} out of range for dimension {dim}"
            )));
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Self::new(amplitudes)
    }

    /// The uniform superposition `(1/√N)·Σ|k⟩` of the given dimension.
    pub fn uniform(dim: usize) -> Result<Self> {
        if dim < 2 || !dim.is_power_of_two() {
            return Err(Error::InvalidState(format!(
                "dimension {dim} is not a power of two >= 2"
            )));
        }
        let amp = Complex64::new(1.0 / (dim as f64).sqrt(), 0.0);
        Self::new(vec![amp; dim])
    }

    /// Wraps an already-normalized vector without re-validating. Used on
    /// propagation hot paths where unitarity guarantees the norm.
    pub(crate) fn from_dvector_unchecked(amps: DVector<Complex64>) -> Self {
        debug_assert!((amps.norm() - 1.0).abs() < 1e-8, "state norm drifted");
        Self { amps }
    }

    /// Hilbert-space dimension.
    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    /// Amplitude of component `i`.
    pub fn amp(&self, i: usize) -> Complex64 {
        self.amps[i]
    }

    /// Euclidean norm of the amplitude vector.
    pub fn norm(&self) -> f64 {
        self.amps.norm()
    }

    /// Borrow of the underlying amplitude vector.
    pub fn as_vector(&self) -> &DVector<Complex64> {
        &self.amps
    }
}

/// An N×N complex matrix validated to be Hermitian at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator {
    mat: DMatrix<Complex64>,
}

impl HermitianOperator {
    /// Validates conjugate symmetry and wraps the matrix. The error reports
    /// the largest asymmetry found.
    pub fn new(mat: DMatrix<Complex64>) -> Result<Self> {
        if !mat.is_square() {
            return Err(Error::DimensionMismatch {
                expected: mat.nrows(),
                found: mat.ncols(),
            });
        }
        let n = mat.nrows();
        let mut max_asymmetry: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                let delta = (mat[(i, j)] - mat[(j, i)].conj()).norm();
                if delta > max_asymmetry {
                    max_asymmetry = delta;
                }
            }
        }
        if max_asymmetry >= HERMITICITY_TOL {
            return Err(Error::NotHermitian { max_asymmetry });
        }
        Ok(Self { mat })
    }

    /// Builds the operator from row-major scalar entries.
    pub fn from_rows(n: usize, entries: &[Complex64]) -> Result<Self> {
        if entries.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                found: entries.len(),
            });
        }
        Self::new(DMatrix::from_row_slice(n, n, entries))
    }

    /// The zero operator of the given dimension.
    pub fn zeros(n: usize) -> Self {
        Self {
            mat: DMatrix::zeros(n, n),
        }
    }

    /// Matrix dimension N.
    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    /// Entry accessor.
    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        self.mat[(i, j)]
    }

    /// Borrow of the underlying matrix.
    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.mat
    }
}

/// Eigenvalues (ascending) and matching orthonormal eigenvectors of a
/// Hermitian operator.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    eigenvalues: Vec<f64>,
    basis: DMatrix<Complex64>,
}

impl SpectralDecomposition {
    /// Eigenvalues sorted ascending.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Eigenvector `k` as a state (column `k` of the basis).
    pub fn eigenvector(&self, k: usize) -> QuantumState {
        QuantumState::from_dvector_unchecked(self.basis.column(k).into_owned())
    }

    /// The unitary whose columns are the eigenvectors, ordered to match
    /// `eigenvalues`.
    pub fn basis(&self) -> &DMatrix<Complex64> {
        &self.basis
    }

    /// Dimension N.
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }
}

/// Eigendecomposition of a Hermitian operator with a deterministic
/// eigenvector phase convention: the first component of each eigenvector
/// whose modulus exceeds 1e-12 is made real and positive.
///
/// Hermiticity is enforced by the [`HermitianOperator`] type, so the
/// decomposition itself cannot fail; validation errors surface at operator
/// construction.
pub fn eigh(h: &HermitianOperator) -> SpectralDecomposition {
    let n = h.dim();
    let se = h.mat.clone().symmetric_eigen();

    // Sort ascending by eigenvalue; the backend returns no particular order.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| se.eigenvalues[a].total_cmp(&se.eigenvalues[b]));

    let mut eigenvalues = Vec::with_capacity(n);
    let mut basis = DMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        eigenvalues.push(se.eigenvalues[src]);
        let col = se.eigenvectors.column(src);
        // Phase convention: rotate so the first significant component is
        // real and positive, keeping overlaps reproducible across runs.
        let pivot = col
            .iter()
            .find(|c| c.norm() > PHASE_TOL)
            .copied()
            .unwrap_or(Complex64::new(1.0, 0.0));
        let phase = pivot.conj() / pivot.norm();
        for i in 0..n {
            basis[(i, dst)] = col[i] * phase;
        }
    }
    SpectralDecomposition { eigenvalues, basis }
}

/// The slice propagator `exp(−i·H·dt) = V·exp(−i·diag(E)·dt)·V†`.
///
/// `dt` may carry either sign (negative values yield the inverse
/// propagator); it must be finite.
pub fn step_unitary(h: &HermitianOperator, dt: f64) -> DMatrix<Complex64> {
    debug_assert!(dt.is_finite(), "step duration must be finite");
    let dec = eigh(h);
    propagator_from(&dec, dt)
}

/// Same as [`step_unitary`] but reuses an existing decomposition.
pub fn propagator_from(dec: &SpectralDecomposition, dt: f64) -> DMatrix<Complex64> {
    let n = dec.dim();
    // V · diag(e^{−iE dt}) — scale columns, then multiply by V†.
    let mut scaled = dec.basis.clone();
    for (k, &e) in dec.eigenvalues.iter().enumerate() {
        let phase = Complex64::from_polar(1.0, -e * dt);
        for i in 0..n {
            scaled[(i, k)] *= phase;
        }
    }
    scaled * dec.basis.adjoint()
}

/// Applies a matrix to a state; errors on dimension mismatch. The caller
/// is expected to pass a (numerically) unitary matrix so the norm is
/// preserved within 1e-10.
pub fn apply(u: &DMatrix<Complex64>, psi: &QuantumState) -> Result<QuantumState> {
    if u.ncols() != psi.dim() {
        return Err(Error::DimensionMismatch {
            expected: u.ncols(),
            found: psi.dim(),
        });
    }
    Ok(QuantumState::from_dvector_unchecked(u * psi.as_vector()))
}

/// Inner product `⟨ψ|φ⟩`, conjugate-linear in the first argument.
pub fn inner(psi: &QuantumState, phi: &QuantumState) -> Complex64 {
    psi.as_vector().dotc(phi.as_vector())
}

/// Expectation value `⟨ψ|H|ψ⟩`, real for Hermitian `H`. The imaginary
/// residue is asserted below 1e-12 and discarded.
pub fn expectation(h: &HermitianOperator, psi: &QuantumState) -> f64 {
    let hv = &h.mat * psi.as_vector();
    let e = psi.as_vector().dotc(&hv);
    debug_assert!(
        e.im.abs() < 1e-12,
        "expectation imaginary residue {} exceeds 1e-12",
        e.im
    );
    e.re
}
