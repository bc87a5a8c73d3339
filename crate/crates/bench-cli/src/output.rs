//! Artifact writers: CSV tables and the JSON metadata sidecar.
//!
//! Every scenario leaves behind the same shape of evidence — data CSVs
//! whose bytes are deterministic for a given configuration and seed, a
//! separate timing CSV (wall clock is the one quantity allowed to vary
//! between identical runs), and a `metadata.json` echoing the resolved
//! configuration.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::config::ScenarioConfig;
use crate::AppError;

/// Creates the output directory (and parents) if needed.
pub fn ensure_dir(dir: &Path) -> Result<(), AppError> {
    fs::create_dir_all(dir)
        .map_err(|e| AppError::Scenario(format!("cannot create {}: {e}", dir.display())))
}

/// Writes `content` to `dir/name`, mapping failures to scenario errors.
pub fn write_file(dir: &Path, name: &str, content: &str) -> Result<PathBuf, AppError> {
    let path = dir.join(name);
    fs::write(&path, content)
        .map_err(|e| AppError::Scenario(format!("cannot write {}: {e}", path.display())))?;
    Ok(path)
}

/// Renders rows into a CSV string with the given header.
pub fn csv_table(header: &str, rows: impl IntoIterator<Item = String>) -> String {
    let mut out = String::from(header);
    out.push('\n');
    for row in rows {
        out.push_str(&row);
        out.push('\n');
    }
    out
}

/// Metadata sidecar written next to every scenario's CSV artifacts. Wall
/// times live here (and in the `*_timing.csv` files), never inside the
/// deterministic data tables.
#[derive(Debug, Serialize)]
pub struct Metadata<'a> {
    /// Subcommand that produced the directory.
    pub command: &'static str,
    /// Fully resolved configuration the run actually used.
    pub config: &'a ScenarioConfig,
    /// Label of the propagated problem (records reduced substitutions).
    pub problem_label: String,
    /// How per-repeat seeds derive from the base seed.
    pub seed_derivation: &'static str,
    /// Seeds consumed, in execution order.
    pub seeds: Vec<u64>,
    /// How repeated measurements are combined in aggregate tables.
    pub aggregation: &'static str,
    /// Wall-clock milliseconds per unit of work, in execution order.
    pub wall_ms: Vec<f64>,
    /// Scan parameters actually used, when the scenario scans durations.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scan: Option<ScanMetadata>,
}

/// Resolved duration-scan parameters recorded for reproducibility.
#[derive(Debug, Serialize)]
pub struct ScanMetadata {
    pub t0: f64,
    pub dt: f64,
    pub cap: usize,
    pub plateau_tolerance: f64,
}

impl<'a> Metadata<'a> {
    /// Starts a sidecar for `command` with the standard derivation notes.
    pub fn new(command: &'static str, config: &'a ScenarioConfig, problem_label: String) -> Self {
        Self {
            command,
            config,
            problem_label,
            seed_derivation:
                "repeat r: base ^ (r * 0x9E3779B97F4A7C15); scan cell i: base ^ i",
            seeds: Vec::new(),
            aggregation: "arithmetic-mean",
            wall_ms: Vec::new(),
            scan: None,
        }
    }

    /// Serializes and writes the sidecar as pretty JSON.
    pub fn write(&self, dir: &Path) -> Result<(), AppError> {
        let text = serde_json::to_string_pretty(self)
            .map_err(|e| AppError::Scenario(format!("cannot serialize metadata: {e}")))?;
        write_file(dir, "metadata.json", &text)?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_table_renders_header_and_rows() {
        let text = csv_table("a,b", ["1,2".to_string(), "3,4".to_string()]);
        assert_eq!(text, "a,b\n1,2\n3,4\n");
    }

    #[test]
    fn metadata_serializes_resolved_config() {
        let cfg = ScenarioConfig::default();
        let mut meta = Metadata::new("run", &cfg, "landau-zener".into());
        meta.seeds.push(42);
        meta.wall_ms.push(1.5);
        let text = serde_json::to_string(&meta).unwrap();
        assert!(text.contains("\"command\":\"run\""));
        assert!(text.contains("\"problem_label\":\"landau-zener\""));
        assert!(text.contains("\"alpha\":0.1"));
        assert!(!text.contains("\"scan\":null"), "absent scan block is skipped");
    }
}
