//! Error type shared by all modules of the crate.

use thiserror::Error;

/// Errors produced by construction, validation, and optimization routines.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A matrix handed to a Hermitian constructor was not Hermitian.
    #[error("matrix is not Hermitian: max |H[i][j] - conj(H[j][i])| = {max_asymmetry:.3e} exceeds 1e-12")]
    NotHermitian {
        /// Largest observed deviation from conjugate symmetry.
        max_asymmetry: f64,
    },

    /// Operands had incompatible dimensions.
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch {
        /// Dimension required by the operation.
        expected: usize,
        /// Dimension actually supplied.
        found: usize,
    },

    /// A state vector failed its unit-norm or shape requirements.
    #[error("invalid quantum state: {0}")]
    InvalidState(String),

    /// The ground state required to be nondegenerate was degenerate.
    #[error("degenerate ground state ({context}): gap {gap:.3e} below tolerance 1e-9")]
    DegenerateGround {
        /// Gap between the two lowest eigenvalues.
        gap: f64,
        /// Which operator or stage detected the degeneracy.
        context: String,
    },

    /// A marked-element index fell outside the Hilbert-space dimension.
    #[error("marked index {m} out of range for dimension {dim}")]
    MarkedIndexOutOfRange {
        /// Requested marked basis index.
        m: usize,
        /// Hilbert-space dimension.
        dim: usize,
    },

    /// A control schedule violated its amplitude or boundary invariants.
    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),

    /// A rendered control was constant, so min-max normalization is undefined.
    #[error("degenerate candidate: raw control {control} is constant (max = min = {value})")]
    DegenerateCandidate {
        /// Which control was constant (1 or 2).
        control: usize,
        /// The constant value.
        value: f64,
    },

    /// An optimizer or scenario configuration failed validation.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// Differential evolution never produced a feasible, scoreable member.
    #[error("no feasible population member was ever found (all candidates rendered constant controls)")]
    NoFeasibleMember,

    /// A duration parameter was not a positive finite number.
    #[error("duration must be positive and finite, got {t}")]
    NonPositiveDuration {
        /// Offending value.
        t: f64,
    },
}
