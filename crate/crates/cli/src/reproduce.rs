//! Consolidated reproduction run: every quantitative claim the toolkit can
//! check, paired with its computed value in one table. Any mismatch makes
//! the run fail.

use std::path::Path;

use num::traits::Signed;
use rand::Rng;
use serde::Serialize;

use bellsim_core::chvm::{
    convergence_report, post_selection_demo, simulate_contextual, Schedule, SubdomainModel,
};
use bellsim_core::collision::{analytic_expectations, resolution_check, run_experiment, CollisionPair, TrialSchedule};
use bellsim_core::ineq::{
    chsh_from_spreadsheet, complete_spreadsheet, extract_samples, fine_feasibility,
    fine_float_tol, gill_experiment, ExtractionMode, OutcomeBiasPredicate, SettingPair, Sign,
    SignVariant, Spreadsheet,
};
use bellsim_core::quantum::{
    chsh_operator, conditional_covariance, correlation_set_quantum, maximal_violation_settings,
    separable_chsh, smeared_correlation, smeared_correlation_closed_form,
    smeared_correlation_monte_carlo, spin_operator, tsirelson_inequality_check, QuantumState,
    SeparableMixture, SphericalCap, UnitVector3,
};
use bellsim_core::rat::{int, ratio, rational_to_f64, zero};
use bellsim_core::rng::{derive_seed, stream_rng};

use crate::report::{CheckLine, RunReport};
use crate::Result;

const SQRT8: f64 = 2.0 * std::f64::consts::SQRT_2;

/// Test-fixture knobs: deliberately corrupt one piece of the pipeline to
/// prove the report notices. All off in production.
#[derive(Clone, Copy, Default)]
pub struct Faults {
    /// Flip the sign of singlet pair correlations in the anti-correlation
    /// rows (the −a·b claims).
    pub flip_singlet_sign: bool,
}

/// Sizes for the embedded Monte Carlo stages.
#[derive(Clone, Copy)]
pub struct ReproduceOptions {
    pub monte_carlo_trials: u64,
    pub gill_rows: u64,
    pub gill_replications: u64,
    pub extraction_seeds: u64,
    pub smearing_samples: u64,
}

impl Default for ReproduceOptions {
    fn default() -> Self {
        ReproduceOptions {
            monte_carlo_trials: 1_000_000,
            gill_rows: 1000,
            gill_replications: 10_000,
            extraction_seeds: 20,
            smearing_samples: 1_000_000,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PaperValueRow {
    pub name: String,
    pub expected: String,
    pub computed: String,
    pub pass: bool,
}

fn singlet_pair_correlation(a: &UnitVector3, b: &UnitVector3, faults: &Faults) -> Result<f64> {
    let cc = conditional_covariance(
        &QuantumState::singlet(),
        &spin_operator(a),
        &spin_operator(b),
    )?;
    Ok(if faults.flip_singlet_sign { -cc.e_ab } else { cc.e_ab })
}

/// Builds the consolidated report. Deterministic for a given seed.
pub fn reproduce_paper(seed: u64, options: &ReproduceOptions, faults: &Faults) -> Result<RunReport> {
    let mut report = RunReport::new("reproduce-paper", seed);
    let mut row = |name: &str, expected: &str, computed: String, pass: bool| {
        report.push(CheckLine::new(name, computed, expected, pass));
    };

    // Singlet anti-correlation values (the −a·b family).
    {
        let z = UnitVector3::z_axis();
        let e_same = singlet_pair_correlation(&z, &z, faults)?;
        row(
            "singlet E(A_a B_a)",
            "-1 within 1e-12",
            format!("{e_same}"),
            (e_same + 1.0).abs() <= 1e-12,
        );
        let e_opposite = singlet_pair_correlation(&z, &z.neg(), faults)?;
        row(
            "singlet E(A_a B_-a)",
            "+1 within 1e-12",
            format!("{e_opposite}"),
            (e_opposite - 1.0).abs() <= 1e-12,
        );
        let mut rng = stream_rng(seed, 10);
        let mut worst: f64 = 0.0;
        for _ in 0..1000 {
            let a = UnitVector3::random(&mut rng);
            let b = UnitVector3::random(&mut rng);
            let e = singlet_pair_correlation(&a, &b, faults)?;
            worst = worst.max((e + a.dot(&b)).abs());
        }
        row(
            "singlet E(AB) + a.b over 1000 random pairs",
            "0 within 1e-12",
            format!("{worst}"),
            worst <= 1e-12,
        );
        // Singles are unaffected by the pair-correlation fault injection.
        let cc = conditional_covariance(
            &QuantumState::singlet(),
            &spin_operator(&UnitVector3::random(&mut rng)),
            &spin_operator(&UnitVector3::random(&mut rng)),
        )?;
        row(
            "singlet singles E(A), E(B)",
            "0 within 1e-12",
            format!("{}, {}", cc.e_a, cc.e_b),
            cc.e_a.abs() <= 1e-12 && cc.e_b.abs() <= 1e-12,
        );
    }

    // Maximal-violation settings and the Tsirelson bound.
    let (a, ap, b, bp) = maximal_violation_settings();
    {
        let qc = correlation_set_quantum(&QuantumState::singlet(), &a, &ap, &b, &bp)?;
        let s = qc.set.chsh_f64(SignVariant::CANONICAL);
        row(
            "singlet CHSH at the maximal settings",
            "2*sqrt(2) within 1e-10",
            format!("{s}"),
            (s - SQRT8).abs() <= 1e-10,
        );
        let quantum_point = fine_feasibility(&qc.set, &fine_float_tol())?;
        row(
            "joint distribution for the singlet point",
            "infeasible",
            format!("feasible = {}", quantum_point.feasible),
            !quantum_point.feasible,
        );

        let s_op = chsh_operator(
            &spin_operator(&a),
            &spin_operator(&ap),
            &spin_operator(&b),
            &spin_operator(&bp),
        )?;
        row(
            "CHSH operator norm at the maximal settings",
            "2*sqrt(2) within 1e-10",
            format!("{}", s_op.operator_norm()),
            (s_op.operator_norm() - SQRT8).abs() <= 1e-10,
        );

        let mut rng = stream_rng(seed, 11);
        let mut worst_norm: f64 = 0.0;
        let mut worst_landau: f64 = 0.0;
        let mut worst_gap: f64 = 0.0;
        for _ in 0..1000 {
            let ops: [bellsim_core::quantum::HermitianOperator; 4] =
                std::array::from_fn(|_| spin_operator(&UnitVector3::random(&mut rng)));
            let check = tsirelson_inequality_check(&ops[0], &ops[1], &ops[2], &ops[3])?;
            worst_norm = worst_norm.max(check.s_norm);
            worst_landau = worst_landau.max(check.landau_residual.unwrap_or(f64::INFINITY));
            worst_gap = worst_gap.min(check.psd_gap);
        }
        row(
            "max ||S|| over 1000 random +/-1 observable quadruples",
            "<= 2*sqrt(2) + 1e-9",
            format!("{worst_norm}"),
            worst_norm <= SQRT8 + 1e-9,
        );
        row(
            "max Landau equality residual",
            "<= 1e-10",
            format!("{worst_landau}"),
            worst_landau <= 1e-10,
        );
        row(
            "min operator-inequality gap",
            ">= -1e-9",
            format!("{worst_gap}"),
            worst_gap >= -1e-9,
        );
    }

    // Separable bound.
    {
        let mut rng = stream_rng(seed, 12);
        let mut max_abs: f64 = 0.0;
        for _ in 0..1000 {
            let n_components = rng.random_range(1..=4);
            let mixture = SeparableMixture::random(&mut rng, n_components);
            let axes: [UnitVector3; 4] = std::array::from_fn(|_| UnitVector3::random(&mut rng));
            let s = separable_chsh(&mixture, &axes[0], &axes[1], &axes[2], &axes[3])?;
            max_abs = max_abs.max(s.abs());
        }
        row(
            "max |S| over 1000 separable mixtures",
            "<= 2 + 1e-9",
            format!("{max_abs}"),
            max_abs <= 2.0 + 1e-9,
        );
    }

    // Smeared correlation.
    {
        let mut worst: f64 = 0.0;
        for eps in [0.05, 0.1, 0.2, 0.4] {
            let cap_a = SphericalCap::new(a, eps)?;
            let cap_b = SphericalCap::new(b, eps)?;
            worst = worst.max(
                (smeared_correlation(&cap_a, &cap_b)
                    - smeared_correlation_closed_form(&cap_a, &cap_b))
                .abs(),
            );
        }
        row(
            "smeared correlation quadrature vs closed form (4 cap widths)",
            "<= 1e-6",
            format!("{worst}"),
            worst <= 1e-6,
        );
        let cap_a = SphericalCap::new(a, 0.2)?;
        let cap_b = SphericalCap::new(b, 0.2)?;
        let mc = smeared_correlation_monte_carlo(
            &cap_a,
            &cap_b,
            options.smearing_samples,
            derive_seed(seed, 13),
        );
        let oracle = smeared_correlation_closed_form(&cap_a, &cap_b);
        row(
            "closed-form smearing oracle vs spherical Monte Carlo",
            "within 4 sigma",
            format!("{} vs {oracle} (sigma {})", mc.mean, mc.std_error),
            (mc.mean - oracle).abs() <= 4.0 * mc.std_error,
        );
    }

    // Spreadsheet law.
    {
        let mut rng = stream_rng(seed, 14);
        let mut worst = zero();
        for _ in 0..2000 {
            use rand::Rng;
            let n = rng.random_range(1..=1000);
            let sheet = Spreadsheet::random(n, &mut rng);
            let (set, _) = chsh_from_spreadsheet(&sheet, SignVariant::CANONICAL)?;
            let m = set.max_abs_chsh();
            if m > worst {
                worst = m;
            }
        }
        row(
            "max |S| over 2000 random sheets, all 8 variants",
            "<= 2 exactly",
            format!("{}", rational_to_f64(&worst)),
            worst <= int(2),
        );
    }

    // Collision experiment.
    {
        let analytic = analytic_expectations();
        row(
            "collision analytic E(AB), E(AC), E(BC), E(BB)",
            "1, -1, -1/2, 1/2 exactly",
            format!(
                "{}, {}, {}, {}",
                analytic.e_ab, analytic.e_ac, analytic.e_bc, analytic.e_bb
            ),
            analytic.e_ab == num::rational::Ratio::from_integer(1)
                && analytic.e_ac == num::rational::Ratio::from_integer(-1)
                && analytic.e_bc == num::rational::Ratio::new(-1, 2)
                && analytic.e_bb == num::rational::Ratio::new(1, 2),
        );
        let run = run_experiment(options.monte_carlo_trials, TrialSchedule::Random, derive_seed(seed, 15))?;
        let mut worst_ratio: f64 = 0.0;
        for pair in CollisionPair::ALL {
            let col = pair.column_pair();
            let want = *analytic.get(pair).numer() as f64 / *analytic.get(pair).denom() as f64;
            let got = rational_to_f64(run.estimates.pair(col));
            let count = run.estimates.count(col).max(1) as f64;
            let sigma = ((1.0 - want * want).max(1e-12) / count).sqrt().max(1e-12);
            worst_ratio = worst_ratio.max((got - want).abs() / sigma);
        }
        row(
            "collision Monte Carlo worst deviation",
            "<= 4 sigma",
            format!("{worst_ratio}"),
            worst_ratio <= 4.0,
        );
        row(
            "naive three-variable inequality on the estimates",
            "violated for both signs, |E(AB) - E(AC)| near 2",
            format!("lhs = {}", rational_to_f64(&run.naive.plus.lhs)),
            run.naive.violated_both() && (rational_to_f64(&run.naive.plus.lhs) - 2.0).abs() < 0.05,
        );
        let resolution = resolution_check(100_000, 2000, derive_seed(seed, 16))?;
        row(
            "four-variable combination",
            "exactly 2",
            format!("{}", resolution.analytic_chsh),
            resolution.analytic_chsh == num::rational::Ratio::from_integer(2),
        );
        row(
            "invisible collision sheet canonical S",
            "|S| <= 2 exactly",
            format!("{}", rational_to_f64(&resolution.sheet_chsh)),
            resolution.sheet_chsh.abs() <= int(2),
        );
        let collision_point = fine_feasibility(&analytic.correlation_set(), &zero())?;
        row(
            "joint distribution for the collision point",
            "feasible",
            format!("feasible = {}", collision_point.feasible),
            collision_point.feasible,
        );
    }

    // Contextual demonstration model.
    {
        let model = post_selection_demo();
        let raw = model.expectations();
        let s_full = raw.set.chsh(SignVariant::CANONICAL);
        row(
            "demonstration model full-ensemble canonical S",
            "3/5, |S| <= 2 exactly",
            format!("{s_full}"),
            s_full == ratio(3, 5) && s_full.abs() <= int(2),
        );
        let post = model.postselect_expectations()?;
        let s_post = post.chsh(SignVariant::CANONICAL);
        row(
            "demonstration model post-selected canonical S",
            "12/5 >= 2.2",
            format!("{s_post}"),
            s_post == ratio(12, 5) && s_post >= ratio(11, 5),
        );
        let signalling = model.apparent_signalling();
        row(
            "post-selected marginals depend on the distant setting",
            "apparent signalling present, raw marginals setting-independent",
            format!("{}", signalling.any_signalling),
            signalling.any_signalling,
        );
        let averaged = model.bell71_average().expectations();
        let identity = SettingPair::ALL.iter().all(|p| averaged.pair(*p) == raw.set.pair(*p));
        row(
            "instrument-averaged route equals direct sums",
            "exact equality",
            format!("{identity}"),
            identity,
        );
        let events = simulate_contextual(
            &model,
            options.monte_carlo_trials,
            Schedule::RoundRobin,
            derive_seed(seed, 17),
        );
        let convergence = convergence_report(&model, &events)?;
        row(
            "demonstration model Monte Carlo",
            "within 4 sigma per pair",
            format!("{}", convergence.all_within_4_sigma),
            convergence.all_within_4_sigma,
        );
    }

    // Subdomain bound endpoints.
    {
        let full = SubdomainModel::new(
            vec![ratio(1, 2), ratio(1, 2)],
            std::array::from_fn(|_| vec![Sign::Plus, Sign::Minus]),
            std::array::from_fn(|_| vec![true, true]),
        )?;
        let full_report = full.larsson_gill_bound()?;
        row(
            "subdomain bound with full domains",
            "bound 2, conditional S <= 2",
            format!("bound {}", rational_to_f64(&full_report.bound)),
            full_report.endpoints_check && full_report.bound == int(2),
        );
        let disjoint = SubdomainModel::new(
            vec![ratio(1, 4); 4],
            std::array::from_fn(|_| vec![Sign::Plus; 4]),
            [
                vec![true, false, false, false],
                vec![false, true, false, false],
                vec![false, false, true, false],
                vec![false, false, false, true],
            ],
        )?;
        let disjoint_report = disjoint.larsson_gill_bound()?;
        row(
            "subdomain bound with empty four-way intersection",
            "bound 4 (no-signalling cap)",
            format!("bound {}", rational_to_f64(&disjoint_report.bound)),
            disjoint_report.endpoints_check && disjoint_report.bound == int(4),
        );
    }

    // Finite-sample labelling bound.
    {
        let mut rng = stream_rng(seed, 18);
        let sheet = Spreadsheet::random(options.gill_rows as usize, &mut rng);
        let outcome = gill_experiment(&sheet, options.gill_replications, derive_seed(seed, 19))?;
        row(
            "labelling experiment Pr(S_obs > 2)",
            "<= 1/2",
            format!("{}", rational_to_f64(&outcome.pr_gt_2)),
            outcome.pr_gt_2 <= ratio(1, 2),
        );
    }

    // End-to-end extraction contrast (simple random vs setting-dependent).
    {
        let sheet = bellsim_core::collision::invisible_spreadsheet(20_000, derive_seed(seed, 20));
        let mut worst_excess = f64::NEG_INFINITY;
        for replica in 0..options.extraction_seeds {
            let extracted = extract_samples(
                &sheet,
                1500,
                ExtractionMode::SimpleRandom,
                derive_seed(seed, 21 + replica),
            )?;
            let (s, sigma) = extracted.chsh_with_error(SignVariant::CANONICAL)?;
            worst_excess = worst_excess.max(s.abs() - (2.0 + 3.0 * sigma));
        }
        row(
            "simple random samples of the invisible sheet (20 seeds)",
            "|S| <= 2 + 3 sigma throughout",
            format!("worst excess {worst_excess}"),
            worst_excess <= 0.0,
        );

        let run = run_experiment(80_000, TrialSchedule::Random, derive_seed(seed, 50))?;
        let completed = complete_spreadsheet(&run.tables, derive_seed(seed, 51))?;
        let (_, s_completed) = chsh_from_spreadsheet(&completed, SignVariant::CANONICAL)?;
        let predicate = OutcomeBiasPredicate::singlet_mimic();
        let biased = extract_samples(
            &completed,
            1500,
            ExtractionMode::SettingDependent(&predicate),
            derive_seed(seed, 52),
        )?;
        let (s_biased, _) = biased.chsh_with_error(SignVariant::CANONICAL)?;
        row(
            "setting-dependent extraction from the completed sheet",
            "completed-sheet |S| <= 2 exactly, biased |S_est| > 2",
            format!(
                "sheet S = {}, biased S_est = {s_biased}",
                rational_to_f64(&s_completed)
            ),
            s_completed.abs() <= int(2) && s_biased.abs() > 2.0,
        );
    }

    Ok(report)
}

/// Runs the reproduction and writes `reproduction.json` when a directory is
/// given.
pub fn reproduce_paper_to(
    seed: u64,
    options: &ReproduceOptions,
    faults: &Faults,
    out: Option<&Path>,
) -> Result<RunReport> {
    let start = std::time::Instant::now();
    let mut report = reproduce_paper(seed, options, faults)?;
    report.wall = start.elapsed();
    if let Some(dir) = out {
        std::fs::create_dir_all(dir)?;
        let rows: Vec<PaperValueRow> = report
            .checks
            .iter()
            .map(|c| PaperValueRow {
                name: c.name.clone(),
                expected: c.expected.clone(),
                computed: c.computed.clone(),
                pass: c.pass,
            })
            .collect();
        std::fs::write(
            dir.join("reproduction.json"),
            serde_json::to_string_pretty(&rows)? + "\n",
        )?;
        report.outputs.push("reproduction.json".into());
        report.write(dir)?;
    }
    Ok(report)
}
