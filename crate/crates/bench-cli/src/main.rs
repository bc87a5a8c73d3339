//! Command-line entry point: subcommand dispatch, flag parsing, and exit
//! codes (0 success, 1 configuration error, 2 scenario failure).

use std::path::PathBuf;
use std::process::ExitCode;

use aqc_bench::config::{MethodKind, Overrides, ProblemKind, ScenarioConfig};
use aqc_bench::{scenario, AppError};
use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

/// Benchmarks optimized adiabatic control pathways against closed-form
/// baselines.
#[derive(Debug, Parser)]
#[command(name = "aqc-bench", version, about, long_about = None)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    #[command(flatten)]
    overrides: FlagOverrides,

    /// TOML config file applied between defaults and flags.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
}

/// Per-field flag overrides; unset flags keep file or default values.
#[derive(Debug, Args)]
struct FlagOverrides {
    /// Problem family.
    #[arg(long, global = true, value_enum)]
    problem: Option<ProblemKind>,

    /// Qubit count (grover).
    #[arg(long, global = true)]
    n: Option<usize>,

    /// Marked basis index (grover).
    #[arg(long, global = true)]
    marked: Option<usize>,

    /// Propagate grover in its 2x2 invariant subspace.
    #[arg(long, global = true)]
    reduced: bool,

    /// Pathway-construction method.
    #[arg(long, global = true, value_enum)]
    method: Option<MethodKind>,

    /// Total duration T.
    #[arg(long, global = true)]
    t: Option<f64>,

    /// Energy-term weight alpha.
    #[arg(long, global = true)]
    alpha: Option<f64>,

    /// Grid slice count M.
    #[arg(long, global = true)]
    m: Option<usize>,

    /// Repeat count R.
    #[arg(long, global = true)]
    repeats: Option<usize>,

    /// Base RNG seed.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Output directory (required unless set in the config file).
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,

    /// Differential-evolution scale factor S.
    #[arg(long, global = true)]
    de_scale: Option<f64>,

    /// Differential-evolution crossover rate C.
    #[arg(long, global = true)]
    de_crossover: Option<f64>,

    /// Differential-evolution population size.
    #[arg(long, global = true)]
    de_population: Option<usize>,

    /// Basis-function pairs per control.
    #[arg(long, global = true)]
    de_n_c: Option<usize>,

    /// Differential-evolution generation cap.
    #[arg(long, global = true)]
    de_g_max: Option<usize>,

    /// Gradient-flow initial step size.
    #[arg(long, global = true)]
    dm_lambda0: Option<f64>,

    /// Gradient-flow backtracking shrink factor.
    #[arg(long, global = true)]
    dm_shrink: Option<f64>,

    /// Gradient-flow backtracking trial cap per iteration.
    #[arg(long, global = true)]
    dm_max_trials: Option<usize>,

    /// Gradient-flow iteration cap.
    #[arg(long, global = true)]
    dm_g_max: Option<usize>,

    /// Duration-scan origin T0 (default: one step).
    #[arg(long, global = true)]
    t0: Option<f64>,

    /// Duration-scan step dT (default: 0.25 for landau-zener,
    /// dt-scale*sqrt(N) for grover).
    #[arg(long, global = true)]
    dt: Option<f64>,

    /// Per-size scan step factor for qubit scaling.
    #[arg(long, global = true)]
    dt_scale: Option<f64>,

    /// Duration-scan step cap before the scan is declared failed.
    #[arg(long, global = true)]
    scan_cap: Option<usize>,
}

impl FlagOverrides {
    fn to_overrides(&self) -> Overrides {
        Overrides {
            problem: self.problem,
            n: self.n,
            marked: self.marked,
            reduced: if self.reduced { Some(true) } else { None },
            method: self.method,
            t: self.t,
            alpha: self.alpha,
            m: self.m,
            repeats: self.repeats,
            seed: self.seed,
            out: self.out.clone(),
            de_scale: self.de_scale,
            de_crossover: self.de_crossover,
            de_population: self.de_population,
            de_n_c: self.de_n_c,
            de_g_max: self.de_g_max,
            dm_lambda0: self.dm_lambda0,
            dm_shrink: self.dm_shrink,
            dm_max_trials: self.dm_max_trials,
            dm_g_max: self.dm_g_max,
            t0: self.t0,
            dt: self.dt,
            dt_scale: self.dt_scale,
            scan_cap: self.scan_cap,
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the configured method once (R times for stochastic methods).
    Run,

    /// Evaluate the method over a (T, alpha) grid, averaging R repeats
    /// per cell.
    GridScan {
        /// Comma-separated durations.
        #[arg(long, value_delimiter = ',', required = true)]
        t_values: Vec<f64>,

        /// Comma-separated energy weights.
        #[arg(long, value_delimiter = ',', required = true)]
        alpha_values: Vec<f64>,
    },

    /// Scan durations upward until the objective plateaus.
    MinTimeScan,

    /// Find the minimal duration for each qubit count in a range.
    QubitScaling {
        /// Smallest qubit count.
        #[arg(long, default_value_t = 1)]
        n_min: usize,

        /// Largest qubit count.
        #[arg(long, default_value_t = 4)]
        n_max: usize,
    },

    /// Measure method wall time per qubit count (median of R runs after
    /// a discarded warm-up).
    Timing {
        /// Smallest qubit count.
        #[arg(long, default_value_t = 1)]
        n_min: usize,

        /// Largest qubit count.
        #[arg(long, default_value_t = 4)]
        n_max: usize,
    },
}

fn run(cli: Cli) -> Result<(), AppError> {
    let overrides = cli.overrides.to_overrides();
    let cfg = ScenarioConfig::resolve(cli.config.as_deref(), &overrides)?;
    let out = cfg.out.clone().ok_or_else(|| {
        AppError::Config("no output directory: pass --out or set `out` in the config file".into())
    })?;
    match cli.command {
        Command::Run => {
            let summary = scenario::run_single(&cfg, &out)?;
            println!(
                "run: {} repeats, mean F = {:.6}, best F = {:.6} -> {}",
                summary.outcomes.len(),
                summary.mean.0,
                summary.best.0,
                out.display()
            );
        }
        Command::GridScan { t_values, alpha_values } => {
            let grid = scenario::grid_scan(&cfg, &t_values, &alpha_values, &out)?;
            println!("grid-scan: {} cells -> {}", grid.cells.len(), out.display());
        }
        Command::MinTimeScan => {
            let outcome = scenario::min_time_scan(&cfg, &out)?;
            println!(
                "min-time-scan: T_min = {} after {} evaluations (F = {:.6}) -> {}",
                outcome.t_min,
                outcome.evaluations,
                outcome.f,
                out.display()
            );
        }
        Command::QubitScaling { n_min, n_max } => {
            let outcome = scenario::qubit_scaling(&cfg, n_min, n_max, &out)?;
            for row in &outcome.rows {
                println!(
                    "qubit-scaling: n = {} (N = {}): T_min = {} (F1 = {:.6})",
                    row.n, row.n_dim, row.t_min, row.f1
                );
            }
            println!("qubit-scaling: {} sizes -> {}", outcome.rows.len(), out.display());
        }
        Command::Timing { n_min, n_max } => {
            let outcome = scenario::timing_report(&cfg, n_min, n_max, &out)?;
            for row in &outcome.rows {
                println!(
                    "timing: n = {}: median {:.3} ms total, {:.6} ms/iteration over {} iterations",
                    row.n, row.total_ms, row.per_iteration_ms, row.iterations
                );
            }
            println!("timing: {} sizes -> {}", outcome.rows.len(), out.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            // clap renders help to stdout and errors to stderr itself.
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code())
        }
    }
}
