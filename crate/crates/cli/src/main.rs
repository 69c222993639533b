use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use bellsim_cli::config::{load_config_file, resolve};
use bellsim_cli::report::RunReport;
use bellsim_cli::reproduce::{reproduce_paper_to, Faults, ReproduceOptions};
use bellsim_cli::{scenarios, CliError, EXIT_INVARIANT_FAILURE};

/// Simulation and verification toolkit for spreadsheet inequalities, singlet
/// correlations, contextual hidden-variable models and the elastic-collision
/// experiment.
#[derive(Parser)]
#[command(name = "bellsim", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one named scenario and write its report.
    Run {
        /// TOML configuration file (see configs/).
        #[arg(long, env = "BELLSIM_CONFIG")]
        config: Option<PathBuf>,
        /// spreadsheet | quantum | chvm | collision | gill | end-to-end.
        #[arg(long, env = "BELLSIM_SCENARIO")]
        scenario: Option<String>,
        /// Master seed; required here or in the config (never implicit).
        #[arg(long, env = "BELLSIM_SEED")]
        seed: Option<u64>,
        /// Output directory for reports and data files.
        #[arg(long, env = "BELLSIM_OUT")]
        out: Option<PathBuf>,
        /// Worker threads; results are identical for any value.
        #[arg(long, env = "BELLSIM_THREADS")]
        threads: Option<usize>,
    },
    /// Recompute every checkable quantitative claim in one table.
    ReproducePaper {
        #[arg(long, env = "BELLSIM_SEED", default_value_t = 1)]
        seed: u64,
        #[arg(long, env = "BELLSIM_OUT")]
        out: Option<PathBuf>,
        #[arg(long, env = "BELLSIM_THREADS")]
        threads: Option<usize>,
        /// Trials for the embedded Monte Carlo stages.
        #[arg(long, default_value_t = 1_000_000)]
        trials: u64,
        /// Replications for the labelling experiment.
        #[arg(long, default_value_t = 10_000)]
        gill_replications: u64,
    },
}

fn init_threads(threads: Option<usize>) {
    if let Some(n) = threads {
        // Ignore a second initialisation (e.g. under test harnesses).
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

fn finish(report: RunReport) -> ExitCode {
    report.print_summary();
    if report.all_pass() {
        ExitCode::SUCCESS
    } else {
        // Machine-readable failure list on stdout.
        let failures = report.failures();
        println!(
            "{}",
            serde_json::to_string(&failures).unwrap_or_else(|_| "[]".to_string())
        );
        ExitCode::from(EXIT_INVARIANT_FAILURE as u8)
    }
}

fn run() -> Result<ExitCode, CliError> {
    let cli = Cli::parse();
    match cli.command {
        Command::Run { config, scenario, seed, out, threads } => {
            let file = match config {
                Some(path) => Some(load_config_file(&path)?),
                None => None,
            };
            let resolved = resolve(file, scenario.as_deref(), seed, out, threads)?;
            init_threads(resolved.threads);
            let report = scenarios::run(&resolved)?;
            Ok(finish(report))
        }
        Command::ReproducePaper { seed, out, threads, trials, gill_replications } => {
            init_threads(threads);
            let options = ReproduceOptions {
                monte_carlo_trials: trials,
                gill_replications,
                ..ReproduceOptions::default()
            };
            let report =
                reproduce_paper_to(seed, &options, &Faults::default(), out.as_deref())?;
            Ok(finish(report))
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => code,
        Err(CliError::Config(message)) => {
            eprintln!("usage error: {message}");
            ExitCode::from(2)
        }
        Err(error) => {
            eprintln!("error: {error}");
            ExitCode::FAILURE
        }
    }
}
