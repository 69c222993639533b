//! Exact-arithmetic spreadsheet engine and inequality checker.
//!
//! An N×4 table of ±1 entries is the counterfactual object behind every
//! CHSH-type bound: each complete row satisfies |ab − ab′ + a′b + a′b′| = 2,
//! so full-column expectations satisfy |S| ≤ 2 for every sign variant, in
//! integer arithmetic with zero tolerance. The module also decides whether a
//! set of correlations admits a joint distribution at all (Fine's theorem),
//! and demonstrates how sub-sampling can — and simple random sampling cannot
//! — manufacture violations.

mod chsh;
mod correlation;
mod fine;
mod sampling;
mod spreadsheet;

pub use chsh::{
    boole_check_values, boole_lg_check, check_row, chsh_from_spreadsheet, joint_from_spreadsheet,
    BooleReport, BooleSign,
};
pub use correlation::{
    CorrelationSet, CorrelationSummary, JointDistribution4, SignVariant, CHSH_BOUND,
};
pub use fine::{fine_conditions, fine_feasibility, fine_float_tol, FineConditions, FineResult};
pub use sampling::{
    complete_spreadsheet, extract_samples, gill_exhaustive, gill_experiment, ExtractedSamples,
    ExtractionMode, GillExact, GillReport, OutcomeBiasPredicate, PairSample, SelectionPredicate,
};
pub use spreadsheet::{Cell, Observable, Row, SettingPair, Sign, Spreadsheet, TripleSheet};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum IneqError {
    #[error("counterfactual row incomplete: hole in column {column} of row {row}")]
    IncompleteRow { row: usize, column: &'static str },
    #[error("spreadsheet is empty")]
    EmptySheet,
    #[error("cell must be -1 or +1, got {0}")]
    InvalidCell(i64),
    #[error("sign variant must have sign product -1, got {0:?}")]
    InvalidVariant([i64; 4]),
    #[error("expectation {name} = {value} outside [-1, 1]")]
    ExpectationOutOfRange { name: String, value: f64 },
    #[error("joint distribution weights sum to {0}, expected 1")]
    UnnormalizedJoint(f64),
    #[error("negative weight in joint distribution at row type {0}")]
    NegativeWeight(usize),
    #[error(
        "requested {requested} rows for setting pair {pair} but only {available} are available"
    )]
    InsufficientRows {
        pair: SettingPair,
        requested: usize,
        available: usize,
    },
    #[error("per-setting sample size must be >= 1")]
    ZeroSampleSize,
    #[error("nothing to complete: all four tables are empty")]
    NothingToComplete,
    #[error("replication count must be >= 1")]
    NoReplications,
    #[error("exhaustive enumeration limited to {limit} rows, sheet has {rows}")]
    ExhaustiveTooLarge { rows: usize, limit: usize },
    #[error("{path} line {line}: {message}")]
    CsvFormat {
        path: String,
        line: usize,
        message: String,
    },
    #[error("csv i/o: {0}")]
    CsvIo(#[from] csv::Error),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, IneqError>;
