//! The elastic-collision experiment with predetermined outcomes.
//!
//! A device launches a 1 kg ball at speed v (uniform on (0, 10]) into a
//! resting 4 kg ball. After the elastic head-on collision the heavy ball
//! moves at v₁ = 2v/5 and the light ball rebounds at v₂ = 3v/5; momentum
//! (1·v = 4·v₁ − 1·v₂) and energy (1·v² = 4·v₁² + 1·v₂²) are conserved
//! identically. Alice measures the heavier ball, Bob the lighter one, each
//! applying one of three threshold observables; the four available setting
//! pairs are (A,B), (A,C), (B,C) and (B,B).
//!
//! All outcomes are predetermined by v, so the four random variables
//! (A(V₁), B(V₁), B(V₂), C(V₂)) possess an invisible joint distribution: a
//! naive three-variable reading of the estimates "violates" the
//! Boole/Leggett–Garg inequality (|1 − (−1)| > 1 ± ½), yet the genuine
//! four-variable CHSH combination equals exactly 2.

use std::io::Write;

use num::rational::Ratio;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ineq::{
    boole_check_values, BooleReport, BooleSign, CorrelationSet, ExtractedSamples, PairSample,
    SettingPair, Sign, Spreadsheet,
};
use crate::rat::{ratio as big_ratio, zero, Rational};
use crate::rng::stream_rng;

#[derive(Debug, Error)]
pub enum CollisionError {
    #[error("initial speed {0} outside (0, 10]")]
    SpeedOutOfRange(f64),
    #[error("systematic schedule needs at least 4 trials, got {0}")]
    TooFewTrials(u64),
    #[error("setting pair {pair} received no trials")]
    UnsampledPair { pair: CollisionPair },
    #[error("correlation: {0}")]
    Correlation(#[from] crate::ineq::IneqError),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, CollisionError>;

/// Speeds are exact rationals so the conservation identities are identities.
pub type Speed = Ratio<i64>;

/// The three threshold observables of the measuring stations.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum ThresholdObservable {
    A,
    B,
    C,
}

impl ThresholdObservable {
    /// A(y) = −1 iff y ≤ 2; B(y) = −1 iff y ≤ 3; C(y) = +1 iff y ≤ 3.
    pub fn value(self, y: &Speed) -> Sign {
        let (threshold, below) = match self {
            ThresholdObservable::A => (Speed::from_integer(2), Sign::Minus),
            ThresholdObservable::B => (Speed::from_integer(3), Sign::Minus),
            ThresholdObservable::C => (Speed::from_integer(3), Sign::Plus),
        };
        if *y <= threshold {
            below
        } else {
            -below
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            ThresholdObservable::A => "A",
            ThresholdObservable::B => "B",
            ThresholdObservable::C => "C",
        }
    }
}

/// The four selectable setting pairs (Alice's observable, Bob's observable).
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub enum CollisionPair {
    AB,
    AC,
    BC,
    BB,
}

impl CollisionPair {
    pub const ALL: [CollisionPair; 4] =
        [CollisionPair::AB, CollisionPair::AC, CollisionPair::BC, CollisionPair::BB];

    pub fn alice(self) -> ThresholdObservable {
        match self {
            CollisionPair::AB | CollisionPair::AC => ThresholdObservable::A,
            CollisionPair::BC | CollisionPair::BB => ThresholdObservable::B,
        }
    }

    pub fn bob(self) -> ThresholdObservable {
        match self {
            CollisionPair::AB | CollisionPair::BB => ThresholdObservable::B,
            CollisionPair::AC | CollisionPair::BC => ThresholdObservable::C,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            CollisionPair::AB => "AB",
            CollisionPair::AC => "AC",
            CollisionPair::BC => "BC",
            CollisionPair::BB => "BB",
        }
    }

    /// Position in the four-column layout (A, A′, B, B′) =
    /// (A(V₁), B(V₁), B(V₂), C(V₂)): AB ↦ (A,B), AC ↦ (A,B′), BB ↦ (A′,B),
    /// BC ↦ (A′,B′).
    pub fn column_pair(self) -> SettingPair {
        match self {
            CollisionPair::AB => SettingPair::AB,
            CollisionPair::AC => SettingPair::ABp,
            CollisionPair::BB => SettingPair::ApB,
            CollisionPair::BC => SettingPair::ApBp,
        }
    }
}

impl std::fmt::Display for CollisionPair {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

/// One fully evaluated run of the experiment.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CollisionTrial {
    pub v: Speed,
    pub v1: Speed,
    pub v2: Speed,
    pub pair: CollisionPair,
    pub out_alice: Sign,
    pub out_bob: Sign,
}

fn speed_in_range(v: &Speed) -> bool {
    *v > Speed::from_integer(0) && *v <= Speed::from_integer(10)
}

/// Post-collision speeds, outcomes, and exact conservation checks.
pub fn evaluate_trial(v: Speed, pair: CollisionPair) -> Result<CollisionTrial> {
    if !speed_in_range(&v) {
        return Err(CollisionError::SpeedOutOfRange(
            *v.numer() as f64 / *v.denom() as f64,
        ));
    }
    let v1 = v * Ratio::new(2, 5);
    let v2 = v * Ratio::new(3, 5);
    // Momentum: 1·v = 4·v₁ − 1·v₂ (the light ball rebounds), exactly.
    assert_eq!(v, Speed::from_integer(4) * v1 - v2);
    // Energy: 1·v² = 4·v₁² + 1·v₂², exactly.
    assert_eq!(v * v, Speed::from_integer(4) * v1 * v1 + v2 * v2);
    Ok(CollisionTrial {
        v,
        v1,
        v2,
        pair,
        out_alice: pair.alice().value(&v1),
        out_bob: pair.bob().value(&v2),
    })
}

/// The exact expectations of the four setting pairs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AnalyticExpectations {
    pub e_ab: Speed,
    pub e_ac: Speed,
    pub e_bc: Speed,
    pub e_bb: Speed,
}

/// Closed-form integration over f_{V₁}(v₁) = 1/4 on (0, 4]:
/// A(v₁) and B(v₂ = 3v₁/2) flip together at v₁ = 2, so E(AB) = 1; C = −B
/// pointwise, so E(AC) = −1; B(v₁)B(v₂) is +1 on (0, 2]∪(3, 4] and −1 on
/// (2, 3], so E(BB) = 1/2 and E(BC) = −1/2.
pub fn analytic_expectations() -> AnalyticExpectations {
    AnalyticExpectations {
        e_ab: Speed::from_integer(1),
        e_ac: Speed::from_integer(-1),
        e_bc: Ratio::new(-1, 2),
        e_bb: Ratio::new(1, 2),
    }
}

impl AnalyticExpectations {
    pub fn get(&self, pair: CollisionPair) -> Speed {
        match pair {
            CollisionPair::AB => self.e_ab,
            CollisionPair::AC => self.e_ac,
            CollisionPair::BC => self.e_bc,
            CollisionPair::BB => self.e_bb,
        }
    }

    /// As a correlation set in the (A, A′, B, B′) = (A(V₁), B(V₁), B(V₂),
    /// C(V₂)) layout, with the exact singles (0, −1/2, 0, 0).
    pub fn correlation_set(&self) -> CorrelationSet {
        let mut pairs: [Rational; 4] = std::array::from_fn(|_| zero());
        for pair in CollisionPair::ALL {
            let e = self.get(pair);
            pairs[pair.column_pair().index()] = big_ratio(*e.numer(), *e.denom());
        }
        let singles = [zero(), big_ratio(-1, 2), zero(), zero()];
        CorrelationSet::new(pairs, singles, [0; 4]).expect("analytic values are in range")
    }

    /// The four-variable CHSH combination E(AB) − E(AC) + E(BB) + E(BC);
    /// equal to exactly 2.
    pub fn chsh_combination(&self) -> Speed {
        self.e_ab - self.e_ac + self.e_bb + self.e_bc
    }
}

/// Uniform speed on (0, 10] with an exact rational value: v = j / 2²⁰ for
/// j drawn uniformly from 1..=10·2²⁰.
pub fn sample_speed<R: Rng + ?Sized>(rng: &mut R) -> Speed {
    const DENOM: i64 = 1 << 20;
    let j = rng.random_range(1..=10 * DENOM);
    Ratio::new(j, DENOM)
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrialSchedule {
    /// Pairs cycle AB, AC, BC, BB.
    Systematic,
    /// Uniformly random pair per trial.
    Random,
}

/// Report of the naive three-variable check (both sign conventions) on the
/// estimates E(AB), E(AC), E(BC): the apparent violation.
#[derive(Clone, Debug)]
pub struct NaiveBooleCheck {
    pub plus: BooleReport,
    pub minus: BooleReport,
}

impl NaiveBooleCheck {
    pub fn violated_both(&self) -> bool {
        !self.plus.satisfied && !self.minus.satisfied
    }
}

/// Outcome of a Monte Carlo run.
#[derive(Clone, Debug)]
pub struct ExperimentRun {
    pub trials: Vec<CollisionTrial>,
    /// Per-setting two-column tables in the four-column layout.
    pub tables: ExtractedSamples,
    /// Estimated expectations (counts carried per pair).
    pub estimates: CorrelationSet,
    /// The naive three-variable inequality on the estimates.
    pub naive: NaiveBooleCheck,
    /// Estimate of the four-variable combination E(AB) − E(AC) + E(BB) + E(BC).
    pub chsh_estimate: Rational,
}

/// Runs `n` trials, drawing a fresh speed per trial and choosing pairs by
/// the schedule. Trials derive per-index seeds, so the run is reproducible
/// for any thread count (and is cheap enough to stay sequential).
pub fn run_experiment(n: u64, schedule: TrialSchedule, seed: u64) -> Result<ExperimentRun> {
    if matches!(schedule, TrialSchedule::Systematic) && n < 4 {
        return Err(CollisionError::TooFewTrials(n));
    }
    let mut trials = Vec::with_capacity(n as usize);
    for index in 0..n {
        let mut rng = stream_rng(seed, index);
        let pair = match schedule {
            TrialSchedule::Systematic => CollisionPair::ALL[(index % 4) as usize],
            TrialSchedule::Random => CollisionPair::ALL[rng.random_range(0..4)],
        };
        let v = sample_speed(&mut rng);
        trials.push(evaluate_trial(v, pair)?);
    }

    let mut rows: [Vec<(Sign, Sign)>; 4] = std::array::from_fn(|_| Vec::new());
    for trial in &trials {
        rows[trial.pair.column_pair().index()].push((trial.out_alice, trial.out_bob));
    }
    for pair in CollisionPair::ALL {
        if rows[pair.column_pair().index()].is_empty() {
            return Err(CollisionError::UnsampledPair { pair });
        }
    }
    let tables = ExtractedSamples::new(std::array::from_fn(|i| PairSample {
        pair: SettingPair::ALL[i],
        rows: std::mem::take(&mut rows[i]),
    }));
    let estimates = tables.correlation_set()?;

    let e_ab = estimates.pair(CollisionPair::AB.column_pair()).clone();
    let e_ac = estimates.pair(CollisionPair::AC.column_pair()).clone();
    let e_bc = estimates.pair(CollisionPair::BC.column_pair()).clone();
    let e_bb = estimates.pair(CollisionPair::BB.column_pair()).clone();
    let naive = NaiveBooleCheck {
        plus: boole_check_values(&e_ab, &e_ac, &e_bc, BooleSign::Plus),
        minus: boole_check_values(&e_ab, &e_ac, &e_bc, BooleSign::Minus),
    };
    let chsh_estimate = e_ab - e_ac + e_bb + e_bc;
    Ok(ExperimentRun { trials, tables, estimates, naive, chsh_estimate })
}

/// The four-variable resolution of the apparent violation.
#[derive(Clone, Debug)]
pub struct ResolutionReport {
    /// E(AB) − E(AC) + E(BB) + E(BC), exact.
    pub analytic_chsh: Speed,
    /// The CHSH bound the combination honours.
    pub bound: i64,
    pub satisfied: bool,
    pub sheet_rows: u64,
    /// Canonical S of the materialised invisible spreadsheet; ≤ 2 exactly.
    pub sheet_chsh: Rational,
    /// Estimate from four simple random samples drawn off the sheet.
    pub extracted_chsh: f64,
    pub extracted_sigma: f64,
    pub extraction_within_3_sigma: bool,
}

/// Forms the four-variable combination over (A(V₁), B(V₁), B(V₂), C(V₂)),
/// materialises the invisible spreadsheet, and confirms that simple random
/// sub-samples respect the bound up to sampling error.
pub fn resolution_check(n_rows: u64, sample_size: usize, seed: u64) -> Result<ResolutionReport> {
    let analytic = analytic_expectations();
    let analytic_chsh = analytic.chsh_combination();
    let satisfied = analytic_chsh <= Speed::from_integer(2);

    let sheet = invisible_spreadsheet(n_rows, seed);
    let (_, sheet_chsh) =
        crate::ineq::chsh_from_spreadsheet(&sheet, crate::ineq::SignVariant::CANONICAL)?;

    let extracted = crate::ineq::extract_samples(
        &sheet,
        sample_size,
        crate::ineq::ExtractionMode::SimpleRandom,
        crate::rng::derive_seed(seed, 1),
    )?;
    let (extracted_chsh, extracted_sigma) =
        extracted.chsh_with_error(crate::ineq::SignVariant::CANONICAL)?;
    Ok(ResolutionReport {
        analytic_chsh,
        bound: 2,
        satisfied,
        sheet_rows: n_rows,
        sheet_chsh,
        extracted_chsh,
        extracted_sigma,
        extraction_within_3_sigma: extracted_chsh.abs() <= 2.0 + 3.0 * extracted_sigma,
    })
}

/// The invisible N×4 spreadsheet: all four predetermined values
/// (A(V₁), B(V₁), B(V₂), C(V₂)) tabulated per trial speed.
pub fn invisible_spreadsheet(n: u64, seed: u64) -> Spreadsheet {
    let mut rows = Vec::with_capacity(n as usize);
    for index in 0..n {
        let mut rng = stream_rng(seed, index);
        let v = sample_speed(&mut rng);
        let v1 = v * Ratio::new(2, 5);
        let v2 = v * Ratio::new(3, 5);
        rows.push([
            ThresholdObservable::A.value(&v1),
            ThresholdObservable::B.value(&v1),
            ThresholdObservable::B.value(&v2),
            ThresholdObservable::C.value(&v2),
        ]);
    }
    Spreadsheet::from_complete_rows(rows)
}

/// Trial log CSV: `trial,v,v1,v2,setting,outA,outB`.
pub fn write_trials_csv<W: Write>(trials: &[CollisionTrial], writer: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    wtr.write_record(["trial", "v", "v1", "v2", "setting", "outA", "outB"])
        .map_err(crate::ineq::IneqError::from)?;
    let to_f64 = |r: &Speed| *r.numer() as f64 / *r.denom() as f64;
    for (i, trial) in trials.iter().enumerate() {
        wtr.write_record([
            i.to_string(),
            to_f64(&trial.v).to_string(),
            to_f64(&trial.v1).to_string(),
            to_f64(&trial.v2).to_string(),
            trial.pair.label().to_string(),
            trial.out_alice.value().to_string(),
            trial.out_bob.value().to_string(),
        ])
        .map_err(crate::ineq::IneqError::from)?;
    }
    wtr.flush().map_err(crate::ineq::IneqError::from)?;
    Ok(())
}
