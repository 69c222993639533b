//! Hidden-variable model engines.
//!
//! Two model families are implemented side by side:
//!
//! * [`LrhvmModel`] — all four outcomes are deterministic functions of one
//!   shared hidden variable with a single distribution. Its counterfactual
//!   pushforward onto the 16 row types exists by construction, so the CHSH
//!   bound is a theorem.
//! * [`ContextualModel`] — each instrument carries its own hidden-variable
//!   space; the four experiments live on four disjoint product spaces and
//!   outcomes may be 0 (no detection). Full-ensemble expectations still obey
//!   CHSH (instrument averaging reduces them to the one-space form), but
//!   post-selected conditional expectations do not, and their marginals can
//!   depend on the distant setting while the raw marginals cannot.
//!
//! [`SubdomainModel`] covers the coincidence-subdomain bound 4 − 2δ, and
//! [`fit_contextual`] searches model space for prescribed correlations.

mod contextual;
mod demo;
mod fit;
mod io;
mod lrhvm;
mod simulate;
mod subdomain;
#[cfg(test)]
pub(crate) mod testutil;

pub use contextual::{
    ContextualExpectations, ContextualModel, ParameterCounts, PostSelectedExpectations,
    SignallingCell, SignallingCondition, SignallingReport, SignallingRow,
};
pub use demo::post_selection_demo;
pub use fit::{fit_contextual, FitResult};
pub use io::{model_from_json, model_to_json};
pub use lrhvm::LrhvmModel;
pub use simulate::{
    convergence_report, simulate_contextual, summarize_events, write_events_csv,
    ConvergenceReport, ConvergenceRow, EmpiricalSummary, Schedule, TrialEvent,
};
pub use subdomain::{EndpointKind, LarssonGillReport, SubdomainModel};

use thiserror::Error;

use crate::ineq::SettingPair;

#[derive(Debug, Error)]
pub enum ChvmError {
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("setting pair {pair} retains zero mass after post-selection")]
    ZeroRetainedMass { pair: SettingPair },
    #[error("subdomain for setting pair {pair} has zero mass")]
    ZeroMassSubdomain { pair: SettingPair },
    #[error("fit parameters out of range: {0}")]
    InvalidFit(String),
    #[error("model file: {0}")]
    Format(String),
    #[error("correlation out of range: {0}")]
    Correlation(#[from] crate::ineq::IneqError),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, ChvmError>;
