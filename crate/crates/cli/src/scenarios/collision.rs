//! Collision scenario: analytic values, Monte Carlo estimates, the apparent
//! three-variable violation, and the four-variable resolution.

use std::path::Path;

use num::traits::Signed;
use serde_json::json;

use bellsim_core::collision::{
    analytic_expectations, resolution_check, run_experiment, write_trials_csv, CollisionPair,
};
use bellsim_core::ineq::SignVariant;
use bellsim_core::rat::{int, rational_to_f64};

use crate::config::CollisionParams;
use crate::report::{CheckLine, RunReport};
use crate::Result;

pub fn run(params: &CollisionParams, seed: u64, out: Option<&Path>) -> Result<RunReport> {
    let mut report = RunReport::new("collision", seed);

    let analytic = analytic_expectations();
    let analytic_ok = analytic.e_ab == num::rational::Ratio::from_integer(1)
        && analytic.e_ac == num::rational::Ratio::from_integer(-1)
        && analytic.e_bc == num::rational::Ratio::new(-1, 2)
        && analytic.e_bb == num::rational::Ratio::new(1, 2);
    report.push(CheckLine::new(
        "analytic expectations (AB, AC, BC, BB)",
        format!(
            "{}, {}, {}, {}",
            analytic.e_ab, analytic.e_ac, analytic.e_bc, analytic.e_bb
        ),
        "1, -1, -1/2, 1/2 exactly",
        analytic_ok,
    ));

    let run = run_experiment(params.n_trials, params.schedule, seed)?;
    let mut worst_sigma_ratio: f64 = 0.0;
    for pair in CollisionPair::ALL {
        let col = pair.column_pair();
        let want =
            *analytic.get(pair).numer() as f64 / *analytic.get(pair).denom() as f64;
        let got = rational_to_f64(run.estimates.pair(col));
        let count = run.estimates.count(col).max(1) as f64;
        let sigma = ((1.0 - want * want).max(1e-12) / count).sqrt().max(1e-12);
        worst_sigma_ratio = worst_sigma_ratio.max((got - want).abs() / sigma);
    }
    report.push(CheckLine::new(
        format!("estimates at n = {} (worst deviation in sigma units)", params.n_trials),
        worst_sigma_ratio,
        "<= 4 sigma per pair",
        worst_sigma_ratio <= 4.0,
    ));

    report.push(CheckLine::new(
        "naive three-variable inequality |E(AB)-E(AC)| <= 1 +/- E(BC)",
        format!(
            "lhs {} vs bounds {} (plus), {} (minus)",
            rational_to_f64(&run.naive.plus.lhs),
            rational_to_f64(&run.naive.plus.bound),
            rational_to_f64(&run.naive.minus.bound)
        ),
        "violated for both signs (apparent violation)",
        run.naive.violated_both(),
    ));

    let resolution = resolution_check(params.n_trials.min(100_000), 2000, seed)?;
    report.push(CheckLine::new(
        "four-variable combination E(AB) - E(AC) + E(BB) + E(BC)",
        format!("{}", resolution.analytic_chsh),
        "exactly 2 <= 2",
        resolution.analytic_chsh == num::rational::Ratio::from_integer(2)
            && resolution.satisfied,
    ));
    report.push(CheckLine::new(
        "invisible spreadsheet canonical S",
        rational_to_f64(&resolution.sheet_chsh),
        "|S| <= 2 exactly",
        resolution.sheet_chsh.abs() <= int(2),
    ));
    report.push(CheckLine::new(
        "simple random extraction from the invisible sheet",
        format!(
            "{} (sigma {})",
            resolution.extracted_chsh, resolution.extracted_sigma
        ),
        "within 2 + 3 sigma",
        resolution.extraction_within_3_sigma,
    ));

    if let Some(dir) = out {
        std::fs::create_dir_all(dir)?;
        let file = std::fs::File::create(dir.join("trials.csv"))?;
        write_trials_csv(&run.trials, file)?;
        report.outputs.push("trials.csv".into());
        let doc = json!({
            "analytic": {
                "e_ab": "1", "e_ac": "-1", "e_bc": "-1/2", "e_bb": "1/2",
            },
            "estimates": run.estimates.summary(SignVariant::CANONICAL),
            "naive_inequality": {
                "lhs": rational_to_f64(&run.naive.plus.lhs),
                "bound_plus": rational_to_f64(&run.naive.plus.bound),
                "bound_minus": rational_to_f64(&run.naive.minus.bound),
                "violated_plus": !run.naive.plus.satisfied,
                "violated_minus": !run.naive.minus.satisfied,
            },
            "four_variable": {
                "analytic": "2",
                "estimate": rational_to_f64(&run.chsh_estimate),
                "bound": 2,
                "satisfied": resolution.satisfied,
            },
        });
        std::fs::write(dir.join("collision_report.json"), serde_json::to_string_pretty(&doc)? + "\n")?;
        report.outputs.push("collision_report.json".into());
    }
    Ok(report)
}
