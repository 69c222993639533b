//! Run reports: one check line per asserted invariant, serialisable to
//! JSON. Wall time is printed to the console but kept out of the report
//! files so identical (config, seed) runs produce byte-identical outputs.

use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::Serialize;

use crate::Result;

#[derive(Clone, Debug, Serialize)]
pub struct CheckLine {
    pub name: String,
    pub computed: String,
    pub expected: String,
    pub pass: bool,
}

impl CheckLine {
    pub fn new(
        name: impl Into<String>,
        computed: impl std::fmt::Display,
        expected: impl Into<String>,
        pass: bool,
    ) -> Self {
        CheckLine {
            name: name.into(),
            computed: computed.to_string(),
            expected: expected.into(),
            pass,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub scenario: String,
    pub version: String,
    pub seed: u64,
    pub checks: Vec<CheckLine>,
    /// Files written by the scenario, relative to the output directory.
    pub outputs: Vec<String>,
    #[serde(skip)]
    pub wall: Duration,
}

impl RunReport {
    pub fn new(scenario: &str, seed: u64) -> Self {
        RunReport {
            scenario: scenario.to_string(),
            version: crate::artifact_version(),
            seed,
            checks: Vec::new(),
            outputs: Vec::new(),
            wall: Duration::ZERO,
        }
    }

    pub fn push(&mut self, check: CheckLine) {
        self.checks.push(check);
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> Vec<&CheckLine> {
        self.checks.iter().filter(|c| !c.pass).collect()
    }

    /// Writes `report.json` into `dir` (creating it) and records the file.
    pub fn write(&mut self, dir: &Path) -> Result<PathBuf> {
        std::fs::create_dir_all(dir)?;
        let path = dir.join("report.json");
        self.outputs.push("report.json".to_string());
        let json = serde_json::to_string_pretty(self)?;
        std::fs::write(&path, json + "\n")?;
        Ok(path)
    }

    pub fn print_summary(&self) {
        println!("scenario: {} ({})", self.scenario, self.version);
        println!("seed: {}", self.seed);
        for check in &self.checks {
            println!(
                "  [{}] {}: {} (expected {})",
                if check.pass { "PASS" } else { "FAIL" },
                check.name,
                check.computed,
                check.expected
            );
        }
        if !self.outputs.is_empty() {
            println!("outputs: {}", self.outputs.join(", "));
        }
        println!(
            "result: {} ({} checks, {:.3} s)",
            if self.all_pass() { "PASS" } else { "FAIL" },
            self.checks.len(),
            self.wall.as_secs_f64()
        );
    }
}

/// Writes a two-or-more-column numeric series as CSV (plot-ready data).
pub fn write_series_csv(
    dir: &Path,
    file: &str,
    header: &[&str],
    rows: &[Vec<String>],
) -> Result<String> {
    std::fs::create_dir_all(dir)?;
    let mut wtr = csv::Writer::from_path(dir.join(file))
        .map_err(bellsim_core::ineq::IneqError::from)?;
    wtr.write_record(header).map_err(bellsim_core::ineq::IneqError::from)?;
    for row in rows {
        wtr.write_record(row).map_err(bellsim_core::ineq::IneqError::from)?;
    }
    wtr.flush().map_err(bellsim_core::ineq::IneqError::from)?;
    Ok(file.to_string())
}
