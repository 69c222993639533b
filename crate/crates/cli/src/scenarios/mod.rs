//! One module per named scenario. Every number in a report comes from one
//! core-module operation; this layer only formats values and compares them
//! against their stated bounds.

mod chvm;
mod collision;
mod end_to_end;
mod gill;
mod quantum;
mod spreadsheet;

use std::path::Path;
use std::time::Instant;

use crate::config::{ResolvedConfig, ScenarioName};
use crate::report::RunReport;
use crate::Result;

/// Executes the configured scenario, writing outputs under `out` when set.
pub fn run(config: &ResolvedConfig) -> Result<RunReport> {
    let start = Instant::now();
    let out: Option<&Path> = config.out.as_deref();
    let mut report = match config.scenario {
        ScenarioName::Spreadsheet => {
            spreadsheet::run(&config.file.spreadsheet, config.seed, out)?
        }
        ScenarioName::Quantum => quantum::run(&config.file.quantum, config.seed, out)?,
        ScenarioName::Chvm => chvm::run(&config.file.chvm, config.seed, out)?,
        ScenarioName::Collision => collision::run(&config.file.collision, config.seed, out)?,
        ScenarioName::Gill => gill::run(&config.file.gill, config.seed, out)?,
        ScenarioName::EndToEnd => end_to_end::run(&config.file.end_to_end, config.seed, out)?,
    };
    report.wall = start.elapsed();
    if let Some(dir) = out {
        report.write(dir)?;
    }
    Ok(report)
}
