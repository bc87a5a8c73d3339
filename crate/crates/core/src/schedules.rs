//! Control schedules on a uniform scaled-time grid and their generators:
//! Linear, Roland-Cerf, and CRAB-parametrized candidates.
//!
//! A schedule holds both controls sampled at the `M + 1` grid points
//! `s_k = k/M`. Amplitudes are confined to `[0, 1]` and the boundary
//! values are hard constraints of the protocol: `u1` starts at 1 and ends
//! at 0, `u2` starts at 0 and ends at 1.
//!
//! CRAB candidates modulate a guess envelope with a truncated Fourier
//! series and are mapped into the feasible set by unity-based (min-max)
//! normalization followed by exact boundary pinning.

use std::io::Write;
use std::sync::Arc;

use crate::{Error, Result};

/// Two control sequences on the uniform grid `s_k = k/M`, bounded in
/// `[0, 1]` with exact boundary values.
#[derive(Debug, Clone, PartialEq)]
pub struct Schedule {
    m: usize,
    u1: Vec<f64>,
    u2: Vec<f64>,
}

impl Schedule {
    /// Validates amplitude bounds, boundary conditions, and shape
    /// (`M + 1` samples per control, `M ≥ 2`).
    pub fn new(u1: Vec<f64>, u2: Vec<f64>) -> Result<Self> {
        let sch = Self::from_raw(u1, u2)?;
        let m = sch.m;
        for (name, ctrl) in [("u1", &sch.u1), ("u2", &sch.u2)] {
            for (k, &v) in ctrl.iter().enumerate() {
                if !(0.0..=1.0).contains(&v) {
                    return Err(Error::InvalidSchedule(format!(
                        "{name}[{k}] = {v} outside [0, 1]"
                    )));
                }
            }
        }
        let bounds = [
            ("u1[0]", sch.u1[0], 1.0),
            ("u1[M]", sch.u1[m], 0.0),
            ("u2[0]", sch.u2[0], 0.0),
            ("u2[M]", sch.u2[m], 1.0),
        ];
        for (name, got, want) in bounds {
            if got != want {
                return Err(Error::InvalidSchedule(format!(
                    "boundary condition {name} = {got}, expected exactly {want}"
                )));
            }
        }
        Ok(sch)
    }

    /// Builds a schedule checking only shape and finiteness, without the
    /// amplitude or boundary constraints. Intended for diagnostics and
    /// for evaluating objective values of unconstrained control tables
    /// (e.g. finite-difference probes); optimizer-facing construction
    /// should go through [`Schedule::new`] or [`constrain`].
    pub fn from_raw(u1: Vec<f64>, u2: Vec<f64>) -> Result<Self> {
        if u1.len() != u2.len() {
            return Err(Error::DimensionMismatch {
                expected: u1.len(),
                found: u2.len(),
            });
        }
        if u1.len() < 3 {
            return Err(Error::InvalidSchedule(format!(
                "need at least 3 grid points (M >= 2), got {}",
                u1.len()
            )));
        }
        if let Some(v) = u1.iter().chain(u2.iter()).find(|v| !v.is_finite()) {
            return Err(Error::InvalidSchedule(format!("non-finite control value {v}")));
        }
        let m = u1.len() - 1;
        Ok(Self { m, u1, u2 })
    }

    /// Slice count M (the grid has M + 1 points).
    pub fn m(&self) -> usize {
        self.m
    }

    /// Scaled time of grid point `k`.
    pub fn s(&self, k: usize) -> f64 {
        k as f64 / self.m as f64
    }

    /// First control at the grid points.
    pub fn u1(&self) -> &[f64] {
        &self.u1
    }

    /// Second control at the grid points.
    pub fn u2(&self) -> &[f64] {
        &self.u2
    }

    /// Midpoint average of `u1` over slice `k` (between grid points `k`
    /// and `k + 1`), as consumed by the propagator.
    pub fn u1_mid(&self, k: usize) -> f64 {
        (self.u1[k] + self.u1[k + 1]) / 2.0
    }

    /// Midpoint average of `u2` over slice `k`.
    pub fn u2_mid(&self, k: usize) -> f64 {
        (self.u2[k] + self.u2[k + 1]) / 2.0
    }

    /// Writes the schedule as CSV with header `s,u1,u2`, one row per grid
    /// point.
    pub fn write_csv<W: Write>(&self, w: &mut W) -> std::io::Result<()> {
        writeln!(w, "s,u1,u2")?;
        for k in 0..=self.m {
            writeln!(w, "{},{},{}", self.s(k), self.u1[k], self.u2[k])?;
        }
        Ok(())
    }
}

/// CRAB search vector: for each control `l ∈ {1, 2}` and harmonic
/// `k ∈ 1..=N_c`, an amplitude pair `(a, b)` and a free frequency `ω`
/// (radians per unit scaled time).
///
/// Genes are stored flat with length `D = 6·N_c`, laid out per control as
/// contiguous `(a, b, ω)` triples: gene index `l·3·N_c + 3·(k−1)` holds
/// `a_l^k`, followed by `b_l^k` and `ω_l^k`.
#[derive(Debug, Clone, PartialEq)]
pub struct CrabParams {
    n_c: usize,
    genes: Vec<f64>,
}

impl CrabParams {
    /// Wraps a flat gene vector, validating length `6·N_c` and finiteness.
    pub fn new(n_c: usize, genes: Vec<f64>) -> Result<Self> {
        if n_c == 0 {
            return Err(Error::InvalidConfig("N_c must be >= 1".into()));
        }
        if genes.len() != 6 * n_c {
            return Err(Error::InvalidConfig(format!(
                "gene vector length {} does not equal 6*N_c = {}",
                genes.len(),
                6 * n_c
            )));
        }
        if let Some(g) = genes.iter().find(|g| !g.is_finite()) {
            return Err(Error::InvalidConfig(format!("non-finite gene value {g}")));
        }
        Ok(Self { n_c, genes })
    }

    /// Harmonic count `N_c`.
    pub fn n_c(&self) -> usize {
        self.n_c
    }

    /// Chromosome length `D = 6·N_c`.
    pub fn len(&self) -> usize {
        self.genes.len()
    }

    /// True iff the chromosome is empty (never the case for valid `N_c`).
    pub fn is_empty(&self) -> bool {
        self.genes.is_empty()
    }

    /// Flat gene slice.
    pub fn genes(&self) -> &[f64] {
        &self.genes
    }

    /// Sine amplitude `a_l^k` for control `l ∈ {0, 1}` and 0-based
    /// harmonic index `k`.
    pub fn a(&self, l: usize, k: usize) -> f64 {
        self.genes[self.base(l, k)]
    }

    /// Cosine amplitude `b_l^k`.
    pub fn b(&self, l: usize, k: usize) -> f64 {
        self.genes[self.base(l, k) + 1]
    }

    /// Frequency `ω_l^k`.
    pub fn omega(&self, l: usize, k: usize) -> f64 {
        self.genes[self.base(l, k) + 2]
    }

    fn base(&self, l: usize, k: usize) -> usize {
        debug_assert!(l < 2 && k < self.n_c);
        l * 3 * self.n_c + 3 * k
    }
}

/// The guess envelope `(u1^g, u2^g)` that CRAB candidates modulate. Both
/// functions must satisfy the boundary conditions themselves.
#[derive(Clone)]
pub struct GuessEnvelope {
    u1: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    u2: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl GuessEnvelope {
    /// Wraps two envelope functions, validating the boundary values
    /// `u1(0) = 1, u1(1) = 0, u2(0) = 0, u2(1) = 1` exactly.
    pub fn new(
        u1: impl Fn(f64) -> f64 + Send + Sync + 'static,
        u2: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Result<Self> {
        let bounds = [
            ("u1(0)", u1(0.0), 1.0),
            ("u1(1)", u1(1.0), 0.0),
            ("u2(0)", u2(0.0), 0.0),
            ("u2(1)", u2(1.0), 1.0),
        ];
        for (name, got, want) in bounds {
            if got != want {
                return Err(Error::InvalidConfig(format!(
                    "envelope boundary {name} = {got}, expected exactly {want}"
                )));
            }
        }
        Ok(Self {
            u1: Arc::new(u1),
            u2: Arc::new(u2),
        })
    }

    /// The default linear ramp `u1^g(s) = 1 − s`, `u2^g(s) = s`.
    pub fn ramp() -> Self {
        Self::new(|s| 1.0 - s, |s| s).expect("linear ramp satisfies the boundary conditions")
    }

    /// Envelope value for control `l ∈ {0, 1}` at scaled time `s`.
    pub fn eval(&self, l: usize, s: f64) -> f64 {
        match l {
            0 => (self.u1)(s),
            _ => (self.u2)(s),
        }
    }
}

impl Default for GuessEnvelope {
    fn default() -> Self {
        Self::ramp()
    }
}

impl std::fmt::Debug for GuessEnvelope {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "GuessEnvelope(u1(0)={}, u2(1)={})", self.eval(0, 0.0), self.eval(1, 1.0))
    }
}

/// The linear interpolation schedule `u2(s) = s`, `u1(s) = 1 − s`.
pub fn linear(m: usize) -> Result<Schedule> {
    if m < 2 {
        return Err(Error::InvalidSchedule(format!("M = {m} must be >= 2")));
    }
    let u2: Vec<f64> = (0..=m).map(|k| k as f64 / m as f64).collect();
    let u1: Vec<f64> = u2.iter().map(|&s| 1.0 - s).collect();
    Schedule::new(u1, u2)
}

/// The Roland-Cerf schedule from the local adiabatic theorem,
/// `u2(s) = 1/2 + tan[(2s − 1)·arctan√(N−1)] / (2√(N−1))` with
/// `u1 = 1 − u2`, for Hilbert dimension `N ≥ 2`. The endpoint values are
/// pinned to their exact limits (the formula reaches them only up to
/// floating-point round-off in `tan(arctan(·))`).
pub fn roland_cerf(n_dim: usize, m: usize) -> Result<Schedule> {
    if n_dim < 2 {
        return Err(Error::InvalidConfig(format!(
            "Roland-Cerf needs Hilbert dimension N >= 2, got {n_dim}"
        )));
    }
    if m < 2 {
        return Err(Error::InvalidSchedule(format!("M = {m} must be >= 2")));
    }
    let root = ((n_dim - 1) as f64).sqrt();
    let half_angle = root.atan();
    let mut u2 = Vec::with_capacity(m + 1);
    u2.push(0.0);
    for k in 1..m {
        let s = k as f64 / m as f64;
        u2.push(0.5 + ((2.0 * s - 1.0) * half_angle).tan() / (2.0 * root));
    }
    u2.push(1.0);
    let u1: Vec<f64> = u2.iter().map(|&v| 1.0 - v).collect();
    Schedule::new(u1, u2)
}

/// Evaluates the CRAB ansatz
/// `u_l(s) = u_l^g(s)·{1 + Σ_k [a_l^k·sin(ω_l^k·s) + b_l^k·cos(ω_l^k·s)]}`
/// at the grid points, with no bounds applied yet.
pub fn crab_render(x: &CrabParams, g: &GuessEnvelope, m: usize) -> (Vec<f64>, Vec<f64>) {
    let mut out = [Vec::with_capacity(m + 1), Vec::with_capacity(m + 1)];
    for (l, ctrl) in out.iter_mut().enumerate() {
        for k in 0..=m {
            let s = k as f64 / m as f64;
            let mut modulation = 1.0;
            for h in 0..x.n_c() {
                let phase = x.omega(l, h) * s;
                modulation += x.a(l, h) * phase.sin() + x.b(l, h) * phase.cos();
            }
            ctrl.push(g.eval(l, s) * modulation);
        }
    }
    let [u1, u2] = out;
    (u1, u2)
}

/// Maps a raw control pair into the feasible set: unity-based (min-max)
/// normalization of each control onto `[0, 1]`, then exact pinning of the
/// boundary entries. A constant raw control has no well-defined
/// normalization and yields [`Error::DegenerateCandidate`].
pub fn constrain(raw_u1: &[f64], raw_u2: &[f64]) -> Result<Schedule> {
    if raw_u1.len() != raw_u2.len() {
        return Err(Error::DimensionMismatch {
            expected: raw_u1.len(),
            found: raw_u2.len(),
        });
    }
    if raw_u1.len() < 3 {
        return Err(Error::InvalidSchedule(format!(
            "need at least 3 grid points (M >= 2), got {}",
            raw_u1.len()
        )));
    }
    let m = raw_u1.len() - 1;
    let mut mapped = Vec::with_capacity(2);
    for (idx, raw) in [raw_u1, raw_u2].into_iter().enumerate() {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for &v in raw {
            if !v.is_finite() {
                return Err(Error::InvalidSchedule(format!("non-finite control value {v}")));
            }
            lo = lo.min(v);
            hi = hi.max(v);
        }
        if !(hi > lo) {
            return Err(Error::DegenerateCandidate {
                control: idx + 1,
                value: lo,
            });
        }
        let span = hi - lo;
        mapped.push(raw.iter().map(|&v| (v - lo) / span).collect::<Vec<f64>>());
    }
    let mut u2 = mapped.pop().expect("two controls");
    let mut u1 = mapped.pop().expect("two controls");
    u1[0] = 1.0;
    u1[m] = 0.0;
    u2[0] = 0.0;
    u2[m] = 1.0;
    Schedule::new(u1, u2)
}
