//! Scenario configuration: a TOML file with one table per scenario, merged
//! with command-line/environment overrides. Unknown keys are rejected with
//! the offending path; every seed is explicit (there is no wall-clock
//! default anywhere).

use std::path::{Path, PathBuf};

use serde::Deserialize;

use bellsim_core::collision::TrialSchedule;
use bellsim_core::quantum::UnitVector3;

use crate::{CliError, Result};

#[derive(Clone, Copy, PartialEq, Eq, Debug, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScenarioName {
    Spreadsheet,
    Quantum,
    Chvm,
    Collision,
    Gill,
    EndToEnd,
}

impl ScenarioName {
    pub fn label(self) -> &'static str {
        match self {
            ScenarioName::Spreadsheet => "spreadsheet",
            ScenarioName::Quantum => "quantum",
            ScenarioName::Chvm => "chvm",
            ScenarioName::Collision => "collision",
            ScenarioName::Gill => "gill",
            ScenarioName::EndToEnd => "end-to-end",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "spreadsheet" => Ok(ScenarioName::Spreadsheet),
            "quantum" => Ok(ScenarioName::Quantum),
            "chvm" => Ok(ScenarioName::Chvm),
            "collision" => Ok(ScenarioName::Collision),
            "gill" => Ok(ScenarioName::Gill),
            "end-to-end" => Ok(ScenarioName::EndToEnd),
            other => Err(CliError::Config(format!(
                "scenario: unknown name `{other}` (expected spreadsheet, quantum, chvm, \
                 collision, gill or end-to-end)"
            ))),
        }
    }
}

#[derive(Clone, Debug, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub scenario: Option<ScenarioName>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub threads: Option<usize>,
    #[serde(default)]
    pub spreadsheet: SpreadsheetParams,
    #[serde(default)]
    pub quantum: QuantumParams,
    #[serde(default)]
    pub chvm: ChvmParams,
    #[serde(default)]
    pub collision: CollisionParams,
    #[serde(default)]
    pub gill: GillParams,
    #[serde(default, rename = "end-to-end")]
    pub end_to_end: EndToEndParams,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpreadsheetParams {
    /// Rows of the generated sheet; must be >= 1.
    pub n: u64,
    /// CSV file to check instead of generating randomly.
    pub csv_path: Option<PathBuf>,
}

impl Default for SpreadsheetParams {
    fn default() -> Self {
        SpreadsheetParams { n: 10_000, csv_path: None }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuantumParams {
    /// Axes as comma-separated triples "x,y,z"; defaults to the
    /// maximal-violation settings.
    pub a: Option<String>,
    pub ap: Option<String>,
    pub b: Option<String>,
    pub bp: Option<String>,
    /// Cap half-widths for the smeared-correlation series.
    pub epsilons: Vec<f64>,
    /// Random separable mixtures to sample for the bound check.
    pub mixtures: u64,
}

impl Default for QuantumParams {
    fn default() -> Self {
        QuantumParams {
            a: None,
            ap: None,
            b: None,
            bp: None,
            epsilons: vec![0.4, 0.2, 0.1, 0.05],
            mixtures: 1000,
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChvmParams {
    /// Model file; the shipped demonstration model when absent.
    pub model_path: Option<PathBuf>,
    pub n_trials: u64,
    /// "round-robin" or "uniform".
    pub schedule: Option<String>,
}

impl Default for ChvmParams {
    fn default() -> Self {
        ChvmParams { model_path: None, n_trials: 1_000_000, schedule: None }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CollisionParams {
    pub n_trials: u64,
    pub schedule: TrialSchedule,
}

impl Default for CollisionParams {
    fn default() -> Self {
        CollisionParams { n_trials: 1_000_000, schedule: TrialSchedule::Random }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GillParams {
    pub n_rows: u64,
    pub replications: u64,
}

impl Default for GillParams {
    fn default() -> Self {
        GillParams { n_rows: 1000, replications: 10_000 }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EndToEndParams {
    pub n_rows: u64,
    pub sample_size: usize,
    pub extraction_seeds: u64,
}

impl Default for EndToEndParams {
    fn default() -> Self {
        EndToEndParams { n_rows: 20_000, sample_size: 1500, extraction_seeds: 20 }
    }
}

/// Fully resolved run parameters after merging file, flags and environment.
#[derive(Clone, Debug)]
pub struct ResolvedConfig {
    pub scenario: ScenarioName,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub threads: Option<usize>,
    pub file: ConfigFile,
}

pub fn load_config_file(path: &Path) -> Result<ConfigFile> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

/// Merges an optional config file with explicit overrides. The seed must be
/// provided by one of them.
pub fn resolve(
    file: Option<ConfigFile>,
    scenario: Option<&str>,
    seed: Option<u64>,
    out: Option<PathBuf>,
    threads: Option<usize>,
) -> Result<ResolvedConfig> {
    let file = file.unwrap_or_default();
    let scenario = match scenario {
        Some(s) => ScenarioName::parse(s)?,
        None => file.scenario.ok_or_else(|| {
            CliError::Config("scenario: missing (set --scenario or `scenario` in the config)".into())
        })?,
    };
    let seed = seed.or(file.seed).ok_or_else(|| {
        CliError::Config("seed: missing (set --seed or `seed` in the config; seeds are never implicit)".into())
    })?;
    let out = out.or_else(|| file.out.clone());
    let threads = threads.or(file.threads);
    Ok(ResolvedConfig { scenario, seed, out, threads, file })
}

/// Parses a comma-separated axis triple. A norm within 1e−6 of 1 is
/// accepted and silently renormalised (with a warning on stderr); anything
/// farther from the sphere is an error.
pub fn parse_axis(name: &str, text: &str) -> Result<UnitVector3> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(CliError::Config(format!(
            "{name}: expected three comma-separated components, got `{text}`"
        )));
    }
    let mut v = [0.0f64; 3];
    for (slot, part) in v.iter_mut().zip(parts.iter()) {
        *slot = part
            .parse()
            .map_err(|_| CliError::Config(format!("{name}: `{part}` is not a number")))?;
    }
    let norm = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    if (norm - 1.0).abs() >= 1e-6 {
        return Err(CliError::Config(format!(
            "{name}: norm {norm} deviates from 1 by {:.3e} (>= 1e-6)",
            (norm - 1.0).abs()
        )));
    }
    if norm != 1.0 {
        eprintln!("warning: {name}: norm {norm} normalised to 1");
    }
    UnitVector3::normalized(v[0], v[1], v[2]).map_err(CliError::from)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_keys_are_rejected_with_path() {
        let err = toml::from_str::<ConfigFile>("scenario = \"gill\"\nbogus = 1\n").unwrap_err();
        assert!(err.to_string().contains("bogus"), "{err}");
        let err =
            toml::from_str::<ConfigFile>("[collision]\nn_trials = 5\nrate = 1.0\n").unwrap_err();
        assert!(err.to_string().contains("rate"), "{err}");
    }

    #[test]
    fn seed_must_be_explicit() {
        let file: ConfigFile = toml::from_str("scenario = \"collision\"\n").unwrap();
        let err = resolve(Some(file), None, None, None, None).unwrap_err();
        assert!(err.to_string().contains("seed"), "{err}");
    }

    #[test]
    fn flags_override_the_file() {
        let file: ConfigFile = toml::from_str("scenario = \"collision\"\nseed = 9\n").unwrap();
        let resolved = resolve(Some(file), Some("gill"), Some(3), None, Some(2)).unwrap();
        assert_eq!(resolved.scenario, ScenarioName::Gill);
        assert_eq!(resolved.seed, 3);
        assert_eq!(resolved.threads, Some(2));
    }

    #[test]
    fn axis_parsing_normalises_or_rejects() {
        assert!(parse_axis("a", "0,0,1").is_ok());
        // Tiny deviation: accepted with renormalisation.
        assert!(parse_axis("a", "0,0,1.0000001").is_ok());
        // Large deviation: rejected.
        let err = parse_axis("a", "0,0,1.1").unwrap_err();
        assert!(err.to_string().contains("norm"), "{err}");
        assert!(parse_axis("a", "1,2").is_err());
        assert!(parse_axis("a", "x,y,z").is_err());
    }
}
