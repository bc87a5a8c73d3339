//! Scenario configuration: defaults, TOML config files, flag overrides,
//! and validation with precise error messages.
//!
//! Resolution order is defaults → config file → command-line flags; the
//! fully resolved configuration is echoed into every output directory so
//! no scenario depends on ambient state.

use std::path::{Path, PathBuf};

use aqc_core::de::DeConfig;
use aqc_core::dmorph::DmorphConfig;
use aqc_core::hamiltonians::{grover, grover_reduced, landau_zener, AdiabaticProblem};
use serde::{Deserialize, Serialize};

use crate::AppError;

/// Problem family selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum ProblemKind {
    /// Single-qubit pair `(σz, σx)`.
    LandauZener,
    /// Search pair of projectors on `n` qubits.
    Grover,
}

/// Pathway-construction method selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum MethodKind {
    /// Straight-line interpolation, the no-optimizer baseline.
    Linear,
    /// Closed-form locally adiabatic schedule (needs the problem size).
    Rc,
    /// Differential evolution over smoothed basis-function controls.
    De,
    /// Gradient flow with backtracking step size.
    Dmorph,
}

impl MethodKind {
    /// Stable lowercase name used in CSV columns and file names.
    pub fn name(&self) -> &'static str {
        match self {
            MethodKind::Linear => "linear",
            MethodKind::Rc => "rc",
            MethodKind::De => "de",
            MethodKind::Dmorph => "dmorph",
        }
    }

    /// Whether repeated runs with different seeds can differ.
    pub fn is_stochastic(&self) -> bool {
        matches!(self, MethodKind::De)
    }
}

/// Tunables of the evolutionary optimizer exposed to configs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DeSettings {
    pub scale: f64,
    pub crossover: f64,
    pub population: usize,
    pub n_c: usize,
    pub g_max: usize,
}

impl Default for DeSettings {
    fn default() -> Self {
        let core = DeConfig::default();
        Self {
            scale: core.scale,
            crossover: core.crossover,
            population: core.population,
            n_c: core.n_c,
            g_max: core.g_max,
        }
    }
}

impl DeSettings {
    /// Expands into the library configuration for one run.
    pub fn to_core(&self, seed: u64, m: usize) -> DeConfig {
        DeConfig {
            scale: self.scale,
            crossover: self.crossover,
            population: self.population,
            dim: 6 * self.n_c,
            g_max: self.g_max,
            n_c: self.n_c,
            seed,
            m,
            ..DeConfig::default()
        }
    }
}

/// Tunables of the gradient-flow optimizer exposed to configs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DmorphSettings {
    pub lambda0: f64,
    pub shrink: f64,
    pub max_trials: usize,
    pub g_max: usize,
}

impl Default for DmorphSettings {
    fn default() -> Self {
        let core = DmorphConfig::default();
        Self {
            lambda0: core.lambda0,
            shrink: core.shrink,
            max_trials: core.max_trials,
            g_max: core.g_max,
        }
    }
}

impl DmorphSettings {
    /// Expands into the library configuration for one run.
    pub fn to_core(&self, m: usize) -> DmorphConfig {
        DmorphConfig {
            lambda0: self.lambda0,
            shrink: self.shrink,
            max_trials: self.max_trials,
            g_max: self.g_max,
            m,
        }
    }
}

/// Minimal-time scan parameters. `t0` and `dt` fall back to
/// problem-dependent defaults; `dt_scale` is the per-size factor used by
/// qubit scaling (step `dt_scale·√N`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScanSettings {
    pub t0: Option<f64>,
    pub dt: Option<f64>,
    pub dt_scale: f64,
    pub cap: usize,
}

impl Default for ScanSettings {
    fn default() -> Self {
        Self {
            t0: None,
            dt: None,
            dt_scale: 0.5,
            cap: 400,
        }
    }
}

/// One fully described benchmark scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub problem: ProblemKind,
    /// Qubit count (Grover only; the Landau-Zener pair is fixed at 1).
    pub n: usize,
    /// Marked basis index (Grover only).
    pub marked: usize,
    /// Opt-in invariant-subspace 2×2 propagation for Grover problems.
    pub reduced: bool,
    pub method: MethodKind,
    /// Total adiabatic duration.
    pub t: f64,
    /// Energy-term weight in `F = F1 + α·F2`.
    pub alpha: f64,
    /// Grid slice count.
    pub m: usize,
    /// Repeat count `R` for aggregation and timing medians.
    pub repeats: usize,
    /// Base RNG seed; per-repeat and per-cell seeds derive from it.
    pub seed: u64,
    /// Output directory; required on the command line if absent here.
    pub out: Option<PathBuf>,
    pub de: DeSettings,
    pub dmorph: DmorphSettings,
    pub scan: ScanSettings,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            problem: ProblemKind::LandauZener,
            n: 1,
            marked: 0,
            reduced: false,
            method: MethodKind::Linear,
            t: 3.0,
            alpha: 0.1,
            m: 100,
            repeats: 5,
            seed: 0,
            out: None,
            de: DeSettings::default(),
            dmorph: DmorphSettings::default(),
            scan: ScanSettings::default(),
        }
    }
}

/// Command-line values layered on top of file values. `None` keeps the
/// underlying setting.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub problem: Option<ProblemKind>,
    pub n: Option<usize>,
    pub marked: Option<usize>,
    pub reduced: Option<bool>,
    pub method: Option<MethodKind>,
    pub t: Option<f64>,
    pub alpha: Option<f64>,
    pub m: Option<usize>,
    pub repeats: Option<usize>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub de_scale: Option<f64>,
    pub de_crossover: Option<f64>,
    pub de_population: Option<usize>,
    pub de_n_c: Option<usize>,
    pub de_g_max: Option<usize>,
    pub dm_lambda0: Option<f64>,
    pub dm_shrink: Option<f64>,
    pub dm_max_trials: Option<usize>,
    pub dm_g_max: Option<usize>,
    pub t0: Option<f64>,
    pub dt: Option<f64>,
    pub dt_scale: Option<f64>,
    pub scan_cap: Option<usize>,
}

impl ScenarioConfig {
    /// Loads a configuration: defaults, optionally overlaid by a TOML
    /// file, then by explicit flag values.
    pub fn resolve(file: Option<&Path>, overrides: &Overrides) -> Result<Self, AppError> {
        let mut cfg = match file {
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| {
                    AppError::Config(format!("cannot read config file {}: {e}", path.display()))
                })?;
                toml::from_str(&text).map_err(|e| {
                    AppError::Config(format!("invalid config file {}: {e}", path.display()))
                })?
            }
            None => Self::default(),
        };
        cfg.apply(overrides);
        cfg.validate()?;
        Ok(cfg)
    }

    /// Applies flag overrides in place.
    pub fn apply(&mut self, o: &Overrides) {
        macro_rules! set {
            ($field:expr, $value:expr) => {
                if let Some(v) = $value.clone() {
                    $field = v;
                }
            };
        }
        set!(self.problem, o.problem);
        set!(self.n, o.n);
        set!(self.marked, o.marked);
        set!(self.reduced, o.reduced);
        set!(self.method, o.method);
        set!(self.t, o.t);
        set!(self.alpha, o.alpha);
        set!(self.m, o.m);
        set!(self.repeats, o.repeats);
        set!(self.seed, o.seed);
        if o.out.is_some() {
            self.out = o.out.clone();
        }
        set!(self.de.scale, o.de_scale);
        set!(self.de.crossover, o.de_crossover);
        set!(self.de.population, o.de_population);
        set!(self.de.n_c, o.de_n_c);
        set!(self.de.g_max, o.de_g_max);
        set!(self.dmorph.lambda0, o.dm_lambda0);
        set!(self.dmorph.shrink, o.dm_shrink);
        set!(self.dmorph.max_trials, o.dm_max_trials);
        set!(self.dmorph.g_max, o.dm_g_max);
        if o.t0.is_some() {
            self.scan.t0 = o.t0;
        }
        if o.dt.is_some() {
            self.scan.dt = o.dt;
        }
        set!(self.scan.dt_scale, o.dt_scale);
        set!(self.scan.cap, o.scan_cap);
    }

    /// Validates every field, returning the first violation with a precise
    /// message.
    pub fn validate(&self) -> Result<(), AppError> {
        let bad = |msg: String| Err(AppError::Config(msg));
        if !(self.t > 0.0) || !self.t.is_finite() {
            return bad(format!("t = {} must be positive and finite", self.t));
        }
        if !(self.alpha >= 0.0) || !self.alpha.is_finite() {
            return bad(format!("alpha = {} must be nonnegative and finite", self.alpha));
        }
        if self.m < 2 {
            return bad(format!("m = {} must be at least 2 grid slices", self.m));
        }
        if self.repeats == 0 {
            return bad("repeats must be at least 1".into());
        }
        match self.problem {
            ProblemKind::LandauZener => {
                if self.reduced {
                    return bad("reduced propagation applies only to the grover problem".into());
                }
            }
            ProblemKind::Grover => {
                if self.n == 0 {
                    return bad("grover needs n >= 1 qubits".into());
                }
                let cap = if self.reduced { 30 } else { 10 };
                if self.n > cap {
                    return bad(format!(
                        "grover n = {} exceeds the supported cap {} ({})",
                        self.n,
                        cap,
                        if self.reduced {
                            "reduced"
                        } else {
                            "full propagation; pass --reduced for larger sizes"
                        }
                    ));
                }
                if self.marked >= (1usize << self.n) {
                    return bad(format!(
                        "marked index {} out of range for n = {} (dimension {})",
                        self.marked,
                        self.n,
                        1usize << self.n
                    ));
                }
            }
        }
        self.de
            .to_core(self.seed, self.m)
            .validate()
            .map_err(|e| AppError::Config(format!("de settings: {e}")))?;
        self.dmorph
            .to_core(self.m)
            .validate()
            .map_err(|e| AppError::Config(format!("dmorph settings: {e}")))?;
        for (name, v) in [("t0", self.scan.t0), ("dt", self.scan.dt)] {
            if let Some(v) = v {
                if !(v > 0.0) || !v.is_finite() {
                    return bad(format!("scan.{name} = {v} must be positive and finite"));
                }
            }
        }
        if !(self.scan.dt_scale > 0.0) || !self.scan.dt_scale.is_finite() {
            return bad(format!(
                "scan.dt_scale = {} must be positive and finite",
                self.scan.dt_scale
            ));
        }
        if self.scan.cap < 2 {
            return bad(format!("scan.cap = {} must be at least 2", self.scan.cap));
        }
        Ok(())
    }

    /// Builds the configured problem. The `reduced` flag substitutes the
    /// 2×2 invariant-subspace formulation explicitly, never silently.
    pub fn build_problem(&self) -> Result<AdiabaticProblem, AppError> {
        let problem = match (self.problem, self.reduced) {
            (ProblemKind::LandauZener, _) => landau_zener(),
            (ProblemKind::Grover, false) => grover(self.n, self.marked)
                .map_err(|e| AppError::Config(e.to_string()))?,
            (ProblemKind::Grover, true) => {
                grover_reduced(self.n).map_err(|e| AppError::Config(e.to_string()))?
            }
        };
        Ok(problem)
    }

    /// The search-space size the closed-form schedule is built for: the
    /// configured `2^n` even when propagation runs in the reduced space.
    pub fn original_dimension(&self) -> usize {
        match self.problem {
            ProblemKind::LandauZener => 2,
            ProblemKind::Grover => 1usize << self.n,
        }
    }

    /// Scan step `dT`: explicit value, else 0.25 for Landau-Zener and
    /// `dt_scale·√N` for Grover.
    pub fn resolved_dt(&self) -> f64 {
        self.scan.dt.unwrap_or(match self.problem {
            ProblemKind::LandauZener => 0.25,
            ProblemKind::Grover => self.scan.dt_scale * (self.original_dimension() as f64).sqrt(),
        })
    }

    /// Scan origin `T0`: explicit value, else one step.
    pub fn resolved_t0(&self) -> f64 {
        self.scan.t0.unwrap_or_else(|| self.resolved_dt())
    }
}

/// Seed for repeat `r` of a run whose base seed is `base`: a fixed-stride
/// multiplicative derivation so repeat streams are unrelated while repeat
/// 0 reproduces the base run exactly.
pub fn repeat_seed(base: u64, r: usize) -> u64 {
    base ^ (r as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

/// Seed for cell `index` of a scan: the documented `base ⊕ index` rule.
pub fn cell_seed(base: u64, index: usize) -> u64 {
    base ^ index as u64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_match_reference_setup() {
        let cfg = ScenarioConfig::default();
        assert_eq!(cfg.de.scale, 0.6);
        assert_eq!(cfg.de.crossover, 0.95);
        assert_eq!(cfg.de.population, 20);
        assert_eq!(cfg.de.n_c, 2);
        assert_eq!(cfg.de.g_max, 300);
        assert_eq!(cfg.dmorph.lambda0, 0.02);
        assert_eq!(cfg.dmorph.shrink, 0.5);
        assert_eq!(cfg.dmorph.max_trials, 100);
        assert_eq!(cfg.dmorph.g_max, 1000);
        assert_eq!(cfg.repeats, 5);
        assert!(cfg.validate().is_ok());
    }

    #[test]
    fn toml_roundtrip_preserves_config() {
        let mut cfg = ScenarioConfig::default();
        cfg.problem = ProblemKind::Grover;
        cfg.n = 3;
        cfg.method = MethodKind::De;
        cfg.scan.dt = Some(0.75);
        let text = toml::to_string(&cfg).unwrap();
        let back: ScenarioConfig = toml::from_str(&text).unwrap();
        assert_eq!(cfg, back);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let err = toml::from_str::<ScenarioConfig>("unknown_knob = 3").unwrap_err();
        assert!(err.to_string().contains("unknown_knob"));
    }

    #[test]
    fn overrides_take_precedence() {
        let mut cfg = ScenarioConfig::default();
        let o = Overrides {
            method: Some(MethodKind::Dmorph),
            alpha: Some(0.4),
            de_population: Some(8),
            ..Overrides::default()
        };
        cfg.apply(&o);
        assert_eq!(cfg.method, MethodKind::Dmorph);
        assert_eq!(cfg.alpha, 0.4);
        assert_eq!(cfg.de.population, 8);
        assert_eq!(cfg.t, 3.0, "untouched fields keep their defaults");
    }

    #[test]
    fn validation_rejects_bad_values() {
        let mut cfg = ScenarioConfig::default();
        cfg.t = 0.0;
        assert!(matches!(cfg.validate(), Err(AppError::Config(_))));

        let mut cfg = ScenarioConfig::default();
        cfg.reduced = true;
        assert!(cfg.validate().is_err(), "reduced needs grover");

        let mut cfg = ScenarioConfig::default();
        cfg.problem = ProblemKind::Grover;
        cfg.n = 2;
        cfg.marked = 4;
        assert!(cfg.validate().is_err(), "marked out of range");

        let mut cfg = ScenarioConfig::default();
        cfg.de.population = 3;
        assert!(cfg.validate().is_err(), "population too small");
    }

    #[test]
    fn scan_defaults_scale_with_problem() {
        let mut cfg = ScenarioConfig::default();
        assert_eq!(cfg.resolved_dt(), 0.25);
        cfg.problem = ProblemKind::Grover;
        cfg.n = 4;
        assert_eq!(cfg.resolved_dt(), 0.5 * 4.0);
        cfg.scan.dt = Some(1.25);
        assert_eq!(cfg.resolved_dt(), 1.25);
        assert_eq!(cfg.resolved_t0(), 1.25);
        cfg.scan.t0 = Some(2.0);
        assert_eq!(cfg.resolved_t0(), 2.0);
    }

    #[test]
    fn seed_derivations_are_stable() {
        assert_eq!(repeat_seed(7, 0), 7);
        assert_ne!(repeat_seed(7, 1), repeat_seed(7, 2));
        assert_eq!(cell_seed(16, 3), 19);
    }
}
