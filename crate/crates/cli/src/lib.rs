//! Scenario runner binding the four engines: configuration, named
//! experiment execution, consolidated reproduction runs, and report files.

pub mod config;
pub mod report;
pub mod reproduce;
pub mod scenarios;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config: {0}")]
    Config(String),
    #[error("{0}")]
    Ineq(#[from] bellsim_core::ineq::IneqError),
    #[error("{0}")]
    Quantum(#[from] bellsim_core::quantum::QuantumError),
    #[error("{0}")]
    Chvm(#[from] bellsim_core::chvm::ChvmError),
    #[error("{0}")]
    Collision(#[from] bellsim_core::collision::CollisionError),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, CliError>;

/// Exit code for invariant failures (distinct from usage errors, which use
/// the conventional 2).
pub const EXIT_INVARIANT_FAILURE: i32 = 3;

pub fn artifact_version() -> String {
    match option_env!("BELLSIM_BUILD_REF") {
        Some(build_ref) => format!("bellsim {} ({build_ref})", env!("CARGO_PKG_VERSION")),
        None => format!("bellsim {}", env!("CARGO_PKG_VERSION")),
    }
}
