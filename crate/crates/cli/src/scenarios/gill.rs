//! Random-labelling scenario: the empirical distribution of S over
//! replications and the printed probability bound.

use std::path::Path;

use bellsim_core::ineq::gill_experiment;
use bellsim_core::ineq::Spreadsheet;
use bellsim_core::rat::{ratio, rational_to_f64};
use bellsim_core::rng::rng_from_seed;

use crate::config::GillParams;
use crate::report::{write_series_csv, CheckLine, RunReport};
use crate::{CliError, Result};

pub fn run(params: &GillParams, seed: u64, out: Option<&Path>) -> Result<RunReport> {
    if params.n_rows == 0 {
        return Err(CliError::Config("gill.n_rows: must be >= 1".into()));
    }
    let mut report = RunReport::new("gill", seed);

    let mut rng = rng_from_seed(seed);
    let sheet = Spreadsheet::random(params.n_rows as usize, &mut rng);
    let outcome = gill_experiment(&sheet, params.replications, seed)?;

    report.push(CheckLine::new(
        format!(
            "Pr(S_obs > 2) over {} replications ({} defined, {} skipped)",
            params.replications,
            outcome.defined(),
            outcome.undefined
        ),
        rational_to_f64(&outcome.pr_gt_2),
        "<= 1/2",
        outcome.pr_gt_2 <= ratio(1, 2),
    ));
    report.push(CheckLine::new(
        "Pr(S_obs >= 2) including boundary cases",
        format!(
            "{} ({} replications exactly on S = 2)",
            rational_to_f64(&outcome.pr_ge_2),
            outcome.boundary_cases
        ),
        "reported",
        true,
    ));
    if let Some(mean) = outcome.mean_s() {
        report.push(CheckLine::new(
            "mean S_obs",
            rational_to_f64(&mean),
            "reported (unbiased for the full-sheet S)",
            true,
        ));
    }

    if let Some(dir) = out {
        let rows: Vec<Vec<String>> = outcome
            .histogram()
            .into_iter()
            .map(|(s, count)| vec![rational_to_f64(&s).to_string(), count.to_string()])
            .collect();
        let file = write_series_csv(dir, "s_obs_histogram.csv", &["s_obs", "count"], &rows)?;
        report.outputs.push(file);
    }
    Ok(report)
}
