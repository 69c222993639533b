//! Cross-engine pipelines through the public API.

use num::traits::Signed;

use bellsim_core::chvm::{post_selection_demo, LrhvmModel};
use bellsim_core::collision::{self, TrialSchedule};
use bellsim_core::ineq::{
    chsh_from_spreadsheet, complete_spreadsheet, extract_samples, fine_feasibility,
    ExtractionMode, OutcomeBiasPredicate, SignVariant,
};
use bellsim_core::rat::{int, zero};
use bellsim_core::rng::rng_from_seed;

/// The full sampling story in one pipeline: a real experiment produces four
/// per-setting tables; completing them into a 4M×4 sheet restores the exact
/// bound; re-sampling the completed sheet with the shipped biased predicate
/// manufactures a violation again.
#[test]
fn collision_tables_complete_and_resample() {
    let run = collision::run_experiment(40_000, TrialSchedule::Random, 5).unwrap();
    let completed = complete_spreadsheet(&run.tables, 6).unwrap();
    assert_eq!(completed.len(), 40_000);
    let (_, s_full) = chsh_from_spreadsheet(&completed, SignVariant::CANONICAL).unwrap();
    assert!(s_full.abs() <= int(2));

    let fair = extract_samples(&completed, 2000, ExtractionMode::SimpleRandom, 7).unwrap();
    let (s_fair, sigma_fair) = fair.chsh_with_error(SignVariant::CANONICAL).unwrap();
    assert!(s_fair.abs() <= 2.0 + 3.0 * sigma_fair);

    let predicate = OutcomeBiasPredicate::singlet_mimic();
    let biased =
        extract_samples(&completed, 2000, ExtractionMode::SettingDependent(&predicate), 8)
            .unwrap();
    let (s_biased, _) = biased.chsh_with_error(SignVariant::CANONICAL).unwrap();
    assert!(s_biased > 2.0, "biased estimate {s_biased}");
}

/// Post-selected correlations of the demonstration model beat the CHSH
/// bound, so no joint distribution can reproduce them — while the
/// full-ensemble correlations of the same model are realisable.
#[test]
fn demo_model_correlations_and_fine_feasibility() {
    let model = post_selection_demo();
    let raw = model.expectations();
    let full = fine_feasibility(&raw.set, &zero()).unwrap();
    assert!(full.feasible);

    let post = model.postselect_expectations().unwrap();
    let conditional = fine_feasibility(&post.set, &zero()).unwrap();
    assert!(!conditional.feasible);
    assert!(post.chsh(SignVariant::CANONICAL) > int(2));
}

/// The one-space model's counterfactual pushforward is itself a valid
/// feasibility witness for its own marginals.
#[test]
fn lrhvm_pushforward_is_its_own_witness() {
    let mut rng = rng_from_seed(11);
    for _ in 0..10 {
        let model = LrhvmModel::random(12, &mut rng);
        let (set, _) = model.expectations();
        let (joint, _) = model.counterfactual_table();
        let feasibility = fine_feasibility(&set, &zero()).unwrap();
        assert!(feasibility.feasible);
        let witness = feasibility.witness.unwrap();
        for pair in bellsim_core::ineq::SettingPair::ALL {
            assert_eq!(witness.pair_expectation(pair), joint.pair_expectation(pair));
        }
    }
}
