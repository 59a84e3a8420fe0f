//! Batch command-line front end.
//!
//! Exit codes: 0 success, 1 validation failure, 2 parse error, 3 resource cap.

pub mod generate;
pub mod report;
pub mod scenario;
pub mod verify;

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::detectors::SubDetectorStrategy;
use crate::error::Error;
use crate::evaluation::{run_experiment, ExperimentConfig, DEFAULT_K_FIT, DEFAULT_W1};
use crate::states::{Ensemble, DEFAULT_DIM_CAP};

use generate::{generate, GenKind, GenParams};
use scenario::{ScenarioError, ScenarioFile};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_RESOURCE: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "mqcb", version, about = "Multiple quantum hypothesis testing experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Pairwise Chernoff distances, the MQCB and the pair condition of a scenario.
    Chernoff {
        scenario: PathBuf,
        /// Write the report here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Error sums of the detector family over a range of copy counts.
    Run {
        scenario: PathBuf,
        #[arg(long, default_value_t = 2)]
        n_min: usize,
        #[arg(long, default_value_t = 8)]
        n_max: usize,
        #[arg(long, default_value_t = 1)]
        n_step: usize,
        /// Fraction of copies given to the first sub-detector.
        #[arg(long, default_value_t = DEFAULT_W1)]
        w1: f64,
        /// Sub-detector strategy: pgm or recursive.
        #[arg(long, default_value = "pgm")]
        sub: SubDetectorStrategy,
        /// Number of trailing rows in the exponent fit.
        #[arg(long, default_value_t = DEFAULT_K_FIT)]
        k_fit: usize,
        #[arg(long, default_value_t = DEFAULT_DIM_CAP)]
        dim_cap: usize,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Randomized invariant suites; exits nonzero on any failure.
    Verify {
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Corrupt each checked detector first (self-test of the validity suite).
        #[arg(long)]
        inject_fault: bool,
    },
    /// Writes a seeded scenario file.
    Gen {
        /// condition-satisfying, equidistant-classical or random.
        kind: GenKind,
        #[arg(long, default_value_t = 3)]
        r: usize,
        #[arg(long, default_value_t = 2)]
        d: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// A command failure with its exit code.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::DimensionCapExceeded { .. } => EXIT_RESOURCE,
            _ => EXIT_VALIDATION,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

impl From<ScenarioError> for Failure {
    fn from(e: ScenarioError) -> Self {
        match e {
            ScenarioError::Parse(message) => Self {
                code: EXIT_PARSE,
                message,
            },
            ScenarioError::Invalid { context, source } => {
                let inner = Failure::from(source);
                Self {
                    code: inner.code,
                    message: format!("{context}: {}", inner.message),
                }
            }
        }
    }
}

fn io_failure(path: &Path, action: &str, e: std::io::Error) -> Failure {
    Failure {
        code: if action == "read" { EXIT_PARSE } else { EXIT_VALIDATION },
        message: format!("cannot {action} {}: {e}", path.display()),
    }
}

/// Parses `args` (including the program name), runs the command and returns the exit code.
pub fn run_cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match execute(cli.command) {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}

fn load_ensemble(path: &Path) -> Result<Ensemble, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| io_failure(path, "read", e))?;
    let file = ScenarioFile::parse(&text).map_err(|e| match e {
        ScenarioError::Parse(m) => ScenarioError::Parse(format!("{}: {m}", path.display())),
        other => other,
    })?;
    Ok(file.to_ensemble()?)
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => {
            report::write_atomic(path, text.as_bytes()).map_err(|e| io_failure(path, "write", e))
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn execute(command: Command) -> Result<i32, Failure> {
    match command {
        Command::Chernoff { scenario, out } => {
            let ensemble = load_ensemble(&scenario)?;
            emit(out.as_deref(), &report::chernoff_report(&ensemble)?)?;
            Ok(EXIT_OK)
        }
        Command::Run {
            scenario,
            n_min,
            n_max,
            n_step,
            w1,
            sub,
            k_fit,
            dim_cap,
            format,
            out,
        } => {
            let ensemble = load_ensemble(&scenario)?;
            let config = ExperimentConfig {
                n_min,
                n_max,
                n_step,
                w1,
                strategy: sub,
                k_fit,
                dim_cap,
            };
            let table = run_experiment(&ensemble, &config)?;
            let text = match format {
                Format::Csv => report::table_csv(&table),
                Format::Json => report::table_json(&table),
            };
            emit(out.as_deref(), &text)?;
            let summary = report::table_summary(&table);
            if out.is_some() {
                print!("{summary}");
            } else {
                eprint!("{summary}");
            }
            for w in &table.warnings {
                eprintln!("warning: {w}");
            }
            Ok(EXIT_OK)
        }
        Command::Verify {
            trials,
            seed,
            inject_fault,
        } => {
            let summary = verify::run_verify(trials, seed, inject_fault);
            print!("{}", summary.render());
            Ok(if summary.all_passed() {
                EXIT_OK
            } else {
                EXIT_VALIDATION
            })
        }
        Command::Gen {
            kind,
            r,
            d,
            seed,
            out,
        } => {
            let file = generate(kind, GenParams { r, dim: d, seed })?;
            emit(out.as_deref(), &file.to_json())?;
            Ok(EXIT_OK)
        }
    }
}
