//! Benchmark harness for adiabatic pathway optimization.
//!
//! Wraps the core library in reproducible command-line scenarios: single
//! runs, `(T, α)` grids, minimal-duration scans, qubit-scaling sweeps,
//! and timing reports. Every scenario resolves its configuration from
//! defaults, an optional TOML file, and explicit flags — in that order —
//! then writes CSV artifacts plus a JSON sidecar echoing the resolved
//! configuration and the seeds actually consumed.

pub mod config;
pub mod output;
pub mod scenario;

/// Failure classes of the harness, mapped onto process exit codes: bad
/// configuration exits 1, a scenario that cannot complete exits 2.
#[derive(Debug)]
pub enum AppError {
    /// The requested configuration is invalid or inconsistent.
    Config(String),
    /// A well-formed scenario failed while executing.
    Scenario(String),
}

impl std::fmt::Display for AppError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            AppError::Config(msg) => write!(f, "config error: {msg}"),
            AppError::Scenario(msg) => write!(f, "scenario failure: {msg}"),
        }
    }
}

impl std::error::Error for AppError {}

impl From<aqc_core::Error> for AppError {
    /// Core-library errors surfacing mid-run are scenario failures;
    /// configuration shape is validated before execution starts.
    fn from(e: aqc_core::Error) -> Self {
        AppError::Scenario(e.to_string())
    }
}

impl AppError {
    /// Process exit code for this failure class.
    pub fn exit_code(&self) -> u8 {
        match self {
            AppError::Config(_) => 1,
            AppError::Scenario(_) => 2,
        }
    }
}
