//! Scenario drivers: single runs, parameter grids, minimal-duration
//! scans, qubit-scaling sweeps, and timing reports.
//!
//! Each driver takes a resolved configuration plus an output directory,
//! writes its CSV artifacts and `metadata.json`, and returns the computed
//! rows so integration tests can assert on values without re-parsing
//! files. Data tables are byte-deterministic for a fixed configuration
//! and seed; wall-clock measurements go to separate `*_timing.csv` files
//! and the metadata sidecar only.

use std::path::Path;
use std::time::Instant;

use aqc_core::dynamics::{objective, ObjectiveReport};
use aqc_core::hamiltonians::AdiabaticProblem;
use aqc_core::schedules::{linear, roland_cerf, GuessEnvelope, Schedule};
use aqc_core::{de, dmorph};

use crate::config::{cell_seed, repeat_seed, MethodKind, ProblemKind, ScenarioConfig};
use crate::output::{csv_table, ensure_dir, write_file, Metadata, ScanMetadata};
use crate::AppError;

/// Plateau tolerance of the minimal-duration scan: the scan stops at the
/// first step whose objective moved less than this from the previous one.
pub const PLATEAU_TOL: f64 = 1e-3;

/// One executed run of the configured method at a specific `(T, α)`.
#[derive(Debug)]
pub struct RunOutcome {
    /// Final scores and diagnostic traces.
    pub report: ObjectiveReport,
    /// Final (for optimizers: best) control schedule.
    pub schedule: Schedule,
    /// Rendered per-iteration history CSV, for optimizer methods.
    pub history_csv: Option<String>,
    /// Iterations the method performed (1 for closed-form schedules).
    pub iterations: usize,
    /// Seed the run consumed (ignored by deterministic methods).
    pub seed: u64,
    /// Wall-clock duration of the run in milliseconds.
    pub wall_ms: f64,
}

/// Runs the configured method once on `problem` at duration `t` and
/// weight `alpha`.
pub fn execute_method(
    cfg: &ScenarioConfig,
    problem: &AdiabaticProblem,
    t: f64,
    alpha: f64,
    seed: u64,
) -> Result<RunOutcome, AppError> {
    let start = Instant::now();
    let (report, schedule, history_csv, iterations) = match cfg.method {
        MethodKind::Linear => {
            let sch = linear(cfg.m)?;
            let report = objective(problem, &sch, t, alpha)?;
            (report, sch, None, 1)
        }
        MethodKind::Rc => {
            let sch = roland_cerf(cfg.original_dimension(), cfg.m)?;
            let report = objective(problem, &sch, t, alpha)?;
            (report, sch, None, 1)
        }
        MethodKind::De => {
            let config = cfg.de.to_core(seed, cfg.m);
            let outcome = de::de_optimize(problem, t, alpha, &GuessEnvelope::ramp(), &config)?;
            let mut buf = Vec::new();
            de::write_history_csv(&outcome.history, &mut buf)
                .expect("in-memory CSV rendering cannot fail");
            let csv = String::from_utf8(buf).expect("history CSV is ASCII");
            (outcome.report, outcome.schedule, Some(csv), config.g_max)
        }
        MethodKind::Dmorph => {
            let config = cfg.dmorph.to_core(cfg.m);
            let outcome = dmorph::dmorph_optimize(problem, t, alpha, None, &config)?;
            let mut buf = Vec::new();
            dmorph::write_history_csv(&outcome.history, &mut buf)
                .expect("in-memory CSV rendering cannot fail");
            let csv = String::from_utf8(buf).expect("history CSV is ASCII");
            (outcome.report, outcome.schedule, Some(csv), outcome.iterations)
        }
    };
    Ok(RunOutcome {
        report,
        schedule,
        history_csv,
        iterations,
        seed,
        wall_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}

/// Repeats actually executed: deterministic methods run once regardless
/// of the configured repeat count.
fn effective_repeats(cfg: &ScenarioConfig) -> usize {
    if cfg.method.is_stochastic() {
        cfg.repeats
    } else {
        1
    }
}

fn mean(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0;
    let mut count = 0usize;
    for v in values {
        sum += v;
        count += 1;
    }
    sum / count as f64
}

fn median(values: &[f64]) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("wall times are finite"));
    let mid = sorted.len() / 2;
    if sorted.len() % 2 == 1 {
        sorted[mid]
    } else {
        0.5 * (sorted[mid - 1] + sorted[mid])
    }
}

/// Aggregate of a repeated single run.
#[derive(Debug)]
pub struct RunSummary {
    /// Per-repeat outcomes in seed order.
    pub outcomes: Vec<RunOutcome>,
    /// Arithmetic means of `(F, F1, F2)` over the repeats.
    pub mean: (f64, f64, f64),
    /// Scores of the repeat with the highest `F`.
    pub best: (f64, f64, f64),
}

/// Runs the configured scenario `R` times (once for deterministic
/// methods), writing per-repeat schedules, traces, and histories plus
/// `runs.csv`, `aggregate.csv`, and `metadata.json` into `dir`.
pub fn run_single(cfg: &ScenarioConfig, dir: &Path) -> Result<RunSummary, AppError> {
    ensure_dir(dir)?;
    let problem = cfg.build_problem()?;
    let reps = effective_repeats(cfg);
    let mut outcomes = Vec::with_capacity(reps);
    for r in 0..reps {
        let seed = repeat_seed(cfg.seed, r);
        let outcome = execute_method(cfg, &problem, cfg.t, cfg.alpha, seed)?;
        let suffix = if reps > 1 { format!("_r{r}") } else { String::new() };

        let mut buf = Vec::new();
        outcome
            .schedule
            .write_csv(&mut buf)
            .expect("in-memory CSV rendering cannot fail");
        write_file(dir, &format!("schedule{suffix}.csv"), &String::from_utf8(buf).unwrap())?;

        let mut buf = Vec::new();
        outcome
            .report
            .write_trace_csv(&mut buf)
            .expect("in-memory CSV rendering cannot fail");
        write_file(dir, &format!("trace{suffix}.csv"), &String::from_utf8(buf).unwrap())?;

        if let Some(csv) = &outcome.history_csv {
            write_file(dir, &format!("history{suffix}.csv"), csv)?;
        }
        outcomes.push(outcome);
    }

    let runs_csv = csv_table(
        "repeat,seed,F,F1,F2,iterations",
        outcomes.iter().enumerate().map(|(r, o)| {
            format!(
                "{r},{},{},{},{},{}",
                o.seed, o.report.f, o.report.f1, o.report.f2, o.iterations
            )
        }),
    );
    write_file(dir, "runs.csv", &runs_csv)?;

    let mean = (
        mean(outcomes.iter().map(|o| o.report.f)),
        mean(outcomes.iter().map(|o| o.report.f1)),
        mean(outcomes.iter().map(|o| o.report.f2)),
    );
    let best_outcome = outcomes
        .iter()
        .max_by(|a, b| a.report.f.partial_cmp(&b.report.f).expect("scores are finite"))
        .expect("at least one repeat ran");
    let best = (best_outcome.report.f, best_outcome.report.f1, best_outcome.report.f2);
    let aggregate_csv = csv_table(
        "repeats,mean_F,mean_F1,mean_F2,best_F,best_F1,best_F2",
        [format!(
            "{reps},{},{},{},{},{},{}",
            mean.0, mean.1, mean.2, best.0, best.1, best.2
        )],
    );
    write_file(dir, "aggregate.csv", &aggregate_csv)?;

    let mut meta = Metadata::new("run", cfg, problem.label().to_string());
    meta.seeds = outcomes.iter().map(|o| o.seed).collect();
    meta.wall_ms = outcomes.iter().map(|o| o.wall_ms).collect();
    meta.write(dir)?;

    Ok(RunSummary { outcomes, mean, best })
}

/// One cell of a `(T, α)` grid: repeat-averaged scores.
#[derive(Debug, Clone, Copy)]
pub struct GridCell {
    pub t: f64,
    pub alpha: f64,
    pub mean_f: f64,
    pub mean_f1: f64,
    pub mean_f2: f64,
}

/// Result of a grid scan, in row-major `(T outer, α inner)` order.
#[derive(Debug)]
pub struct GridOutcome {
    pub cells: Vec<GridCell>,
}

/// Evaluates the configured method over the Cartesian product of
/// durations and weights, averaging `R` repeats per cell. Writes
/// `grid.csv`, `grid_timing.csv`, and `metadata.json` into `dir`.
pub fn grid_scan(
    cfg: &ScenarioConfig,
    t_values: &[f64],
    alpha_values: &[f64],
    dir: &Path,
) -> Result<GridOutcome, AppError> {
    if t_values.is_empty() || alpha_values.is_empty() {
        return Err(AppError::Config(
            "grid scan needs at least one T value and one alpha value".into(),
        ));
    }
    for &t in t_values {
        if !(t > 0.0) || !t.is_finite() {
            return Err(AppError::Config(format!("grid T = {t} must be positive and finite")));
        }
    }
    for &a in alpha_values {
        if !(a >= 0.0) || !a.is_finite() {
            return Err(AppError::Config(format!(
                "grid alpha = {a} must be nonnegative and finite"
            )));
        }
    }
    ensure_dir(dir)?;
    let problem = cfg.build_problem()?;
    let reps = effective_repeats(cfg);
    let mut cells = Vec::new();
    let mut seeds = Vec::new();
    let mut walls = Vec::new();
    for (i, &t) in t_values.iter().enumerate() {
        for (j, &alpha) in alpha_values.iter().enumerate() {
            let index = i * alpha_values.len() + j;
            let base = cell_seed(cfg.seed, index);
            seeds.push(base);
            let start = Instant::now();
            let mut fs = Vec::with_capacity(reps);
            let mut f1s = Vec::with_capacity(reps);
            let mut f2s = Vec::with_capacity(reps);
            for r in 0..reps {
                let outcome = execute_method(cfg, &problem, t, alpha, repeat_seed(base, r))?;
                fs.push(outcome.report.f);
                f1s.push(outcome.report.f1);
                f2s.push(outcome.report.f2);
            }
            walls.push(start.elapsed().as_secs_f64() * 1e3);
            cells.push(GridCell {
                t,
                alpha,
                mean_f: mean(fs),
                mean_f1: mean(f1s),
                mean_f2: mean(f2s),
            });
        }
    }

    let grid_csv = csv_table(
        "T,alpha,mean_F,mean_F1,mean_F2",
        cells.iter().map(|c| {
            format!("{},{},{},{},{}", c.t, c.alpha, c.mean_f, c.mean_f1, c.mean_f2)
        }),
    );
    write_file(dir, "grid.csv", &grid_csv)?;
    let timing_csv = csv_table(
        "T,alpha,wall_ms",
        cells
            .iter()
            .zip(&walls)
            .map(|(c, w)| format!("{},{},{w}", c.t, c.alpha)),
    );
    write_file(dir, "grid_timing.csv", &timing_csv)?;

    let mut meta = Metadata::new("grid-scan", cfg, problem.label().to_string());
    meta.seeds = seeds;
    meta.wall_ms = walls;
    meta.write(dir)?;

    Ok(GridOutcome { cells })
}

/// One evaluated duration in a minimal-duration scan.
#[derive(Debug, Clone, Copy)]
pub struct ScanStep {
    pub t: f64,
    pub f: f64,
    pub f1: f64,
    pub f2: f64,
}

/// Result of a completed minimal-duration scan.
#[derive(Debug)]
pub struct MinTimeOutcome {
    /// First duration at which the objective plateaued.
    pub t_min: f64,
    /// Objective scores at `t_min`.
    pub f: f64,
    pub f1: f64,
    /// Durations evaluated, including `t_min`.
    pub evaluations: usize,
    /// Every evaluated step in order.
    pub steps: Vec<ScanStep>,
}

/// Walks `T = T0, T0+dT, …` with a fixed seed until the objective stops
/// improving. Returns the trace and the plateau position, if any.
fn scan_durations(
    cfg: &ScenarioConfig,
    problem: &AdiabaticProblem,
    seed: u64,
) -> Result<(Vec<ScanStep>, Option<usize>), AppError> {
    let dt = cfg.resolved_dt();
    let t0 = cfg.resolved_t0();
    let mut steps: Vec<ScanStep> = Vec::new();
    for k in 0..cfg.scan.cap {
        let t = t0 + dt * k as f64;
        let outcome = execute_method(cfg, problem, t, cfg.alpha, seed)?;
        let step = ScanStep {
            t,
            f: outcome.report.f,
            f1: outcome.report.f1,
            f2: outcome.report.f2,
        };
        let plateaued = steps
            .last()
            .is_some_and(|prev| (step.f - prev.f).abs() < PLATEAU_TOL);
        steps.push(step);
        if plateaued {
            let index = steps.len() - 1;
            return Ok((steps, Some(index)));
        }
    }
    Ok((steps, None))
}

fn steps_csv(steps: &[ScanStep]) -> String {
    csv_table(
        "step,T,F,F1,F2",
        steps
            .iter()
            .enumerate()
            .map(|(k, s)| format!("{k},{},{},{},{}", s.t, s.f, s.f1, s.f2)),
    )
}

/// Scans durations upward until the objective plateaus, writing
/// `steps.csv`, `min_time.csv`, and `metadata.json` into `dir`. Hitting
/// the step cap without a plateau is a scenario failure; the partial
/// `steps.csv` is still written for diagnosis.
pub fn min_time_scan(cfg: &ScenarioConfig, dir: &Path) -> Result<MinTimeOutcome, AppError> {
    ensure_dir(dir)?;
    let problem = cfg.build_problem()?;
    let start = Instant::now();
    let (steps, plateau) = scan_durations(cfg, &problem, cfg.seed)?;
    let wall = start.elapsed().as_secs_f64() * 1e3;
    write_file(dir, "steps.csv", &steps_csv(&steps))?;

    let mut meta = Metadata::new("min-time-scan", cfg, problem.label().to_string());
    meta.seeds = vec![cfg.seed];
    meta.wall_ms = vec![wall];
    meta.scan = Some(ScanMetadata {
        t0: cfg.resolved_t0(),
        dt: cfg.resolved_dt(),
        cap: cfg.scan.cap,
        plateau_tolerance: PLATEAU_TOL,
    });
    meta.write(dir)?;

    let Some(index) = plateau else {
        return Err(AppError::Scenario(format!(
            "duration scan did not plateau within {} steps (reached T = {}, dT = {})",
            cfg.scan.cap,
            steps.last().map(|s| s.t).unwrap_or(cfg.resolved_t0()),
            cfg.resolved_dt(),
        )));
    };
    let hit = steps[index];
    let outcome = MinTimeOutcome {
        t_min: hit.t,
        f: hit.f,
        f1: hit.f1,
        evaluations: steps.len(),
        steps,
    };
    let min_csv = csv_table(
        "T_min,F,F1,evaluations",
        [format!(
            "{},{},{},{}",
            outcome.t_min, outcome.f, outcome.f1, outcome.evaluations
        )],
    );
    write_file(dir, "min_time.csv", &min_csv)?;
    Ok(outcome)
}

/// Minimal duration found for one problem size.
#[derive(Debug, Clone, Copy)]
pub struct ScalingRow {
    pub n: usize,
    pub n_dim: usize,
    pub dt: f64,
    pub t_min: f64,
    pub f: f64,
    pub f1: f64,
    pub evaluations: usize,
}

/// Result of a qubit-scaling sweep.
#[derive(Debug)]
pub struct ScalingOutcome {
    pub rows: Vec<ScalingRow>,
}

/// Repeats the minimal-duration scan for each qubit count in
/// `n_min..=n_max`, stepping `dT = dt_scale·√N` per size unless an
/// explicit `dt` is set. Writes `scaling.csv`, per-size `steps_n*.csv`,
/// `scaling_timing.csv`, and `metadata.json` into `dir`.
pub fn qubit_scaling(
    cfg: &ScenarioConfig,
    n_min: usize,
    n_max: usize,
    dir: &Path,
) -> Result<ScalingOutcome, AppError> {
    if cfg.problem != ProblemKind::Grover {
        return Err(AppError::Config(
            "qubit scaling is defined for the grover problem; pass --problem grover".into(),
        ));
    }
    if n_min == 0 || n_max < n_min {
        return Err(AppError::Config(format!(
            "invalid qubit range {n_min}..={n_max}: need 1 <= n_min <= n_max"
        )));
    }
    ensure_dir(dir)?;
    let mut rows = Vec::new();
    let mut seeds = Vec::new();
    let mut walls = Vec::new();
    let mut labels = Vec::new();
    for n in n_min..=n_max {
        let mut cfg_n = cfg.clone();
        cfg_n.n = n;
        cfg_n.marked = cfg.marked.min((1usize << n) - 1);
        cfg_n.validate()?;
        let problem = cfg_n.build_problem()?;
        labels.push(problem.label().to_string());
        let seed = cell_seed(cfg.seed, n);
        seeds.push(seed);
        let start = Instant::now();
        let (steps, plateau) = scan_durations(&cfg_n, &problem, seed)?;
        walls.push(start.elapsed().as_secs_f64() * 1e3);
        write_file(dir, &format!("steps_n{n}.csv"), &steps_csv(&steps))?;
        let Some(index) = plateau else {
            return Err(AppError::Scenario(format!(
                "duration scan for n = {n} did not plateau within {} steps (dT = {})",
                cfg_n.scan.cap,
                cfg_n.resolved_dt(),
            )));
        };
        let hit = steps[index];
        rows.push(ScalingRow {
            n,
            n_dim: 1usize << n,
            dt: cfg_n.resolved_dt(),
            t_min: hit.t,
            f: hit.f,
            f1: hit.f1,
            evaluations: steps.len(),
        });
    }

    let scaling_csv = csv_table(
        "n,N,dT,T_min,F,F1,evaluations",
        rows.iter().map(|r| {
            format!(
                "{},{},{},{},{},{},{}",
                r.n, r.n_dim, r.dt, r.t_min, r.f, r.f1, r.evaluations
            )
        }),
    );
    write_file(dir, "scaling.csv", &scaling_csv)?;
    let timing_csv = csv_table(
        "n,wall_ms",
        rows.iter().zip(&walls).map(|(r, w)| format!("{},{w}", r.n)),
    );
    write_file(dir, "scaling_timing.csv", &timing_csv)?;

    let mut meta = Metadata::new("qubit-scaling", cfg, labels.join(";"));
    meta.seeds = seeds;
    meta.wall_ms = walls;
    meta.write(dir)?;

    Ok(ScalingOutcome { rows })
}

/// Median-of-repeats timing for one problem size.
#[derive(Debug, Clone, Copy)]
pub struct TimingRow {
    pub n: usize,
    pub total_ms: f64,
    pub per_iteration_ms: f64,
    pub iterations: usize,
}

/// Result of a timing report.
#[derive(Debug)]
pub struct TimingOutcome {
    pub rows: Vec<TimingRow>,
}

/// Measures wall time of the configured method per qubit count: one
/// discarded warm-up run, then the median of `R` timed runs. Writes
/// `timing.csv` and `metadata.json` into `dir`.
pub fn timing_report(
    cfg: &ScenarioConfig,
    n_min: usize,
    n_max: usize,
    dir: &Path,
) -> Result<TimingOutcome, AppError> {
    if cfg.problem != ProblemKind::Grover {
        return Err(AppError::Config(
            "timing reports are defined for the grover problem; pass --problem grover".into(),
        ));
    }
    if n_min == 0 || n_max < n_min {
        return Err(AppError::Config(format!(
            "invalid qubit range {n_min}..={n_max}: need 1 <= n_min <= n_max"
        )));
    }
    ensure_dir(dir)?;
    let mut rows = Vec::new();
    let mut seeds = Vec::new();
    let mut all_walls = Vec::new();
    let mut labels = Vec::new();
    for n in n_min..=n_max {
        let mut cfg_n = cfg.clone();
        cfg_n.n = n;
        cfg_n.marked = cfg.marked.min((1usize << n) - 1);
        cfg_n.validate()?;
        let problem = cfg_n.build_problem()?;
        labels.push(problem.label().to_string());
        let base = cell_seed(cfg.seed, n);
        seeds.push(base);
        // Warm-up run: pays one-time costs, excluded from the medians.
        execute_method(&cfg_n, &problem, cfg_n.t, cfg_n.alpha, repeat_seed(base, 0))?;
        let mut walls = Vec::with_capacity(cfg.repeats);
        let mut iterations = 0usize;
        for r in 0..cfg.repeats {
            let outcome =
                execute_method(&cfg_n, &problem, cfg_n.t, cfg_n.alpha, repeat_seed(base, r))?;
            if r == 0 {
                iterations = outcome.iterations;
            }
            walls.push(outcome.wall_ms);
        }
        let total_ms = median(&walls);
        rows.push(TimingRow {
            n,
            total_ms,
            per_iteration_ms: total_ms / iterations as f64,
            iterations,
        });
        all_walls.extend(walls);
    }

    let timing_csv = csv_table(
        "n,method,time_per_iteration_ms,total_time_ms,iterations",
        rows.iter().map(|r| {
            format!(
                "{},{},{},{},{}",
                r.n,
                cfg.method.name(),
                r.per_iteration_ms,
                r.total_ms,
                r.iterations
            )
        }),
    );
    write_file(dir, "timing.csv", &timing_csv)?;

    let mut meta = Metadata::new("timing", cfg, labels.join(";"));
    meta.seeds = seeds;
    meta.wall_ms = all_walls;
    meta.write(dir)?;

    Ok(TimingOutcome { rows })
}
