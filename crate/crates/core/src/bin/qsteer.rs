//! Command-line driver for the steering/discord experiments.
//!
//! Exit codes: 0 success, 2 input parse or domain error, 3 non-physical
//! state, 4 numeric or sampling failure, 1 anything else (I/O).

use clap::{Parser, Subcommand};
use qsteer::correlations::CorrelationError;
use qsteer::experiments::{
    analyze, scatter, scatter_csv, surface, surface_csv, two_param_csv, two_param_sweep,
    ExperimentError,
};
use qsteer::io::{ellipsoid_csv_header, ellipsoid_csv_row, load_state, state_json_line, IoError};
use qsteer::sampling::{sample, Category, SamplerConfig};
use qsteer::state::{to_canonical, StateError};
use qsteer::steering::canonical_ellipsoid;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "qsteer",
    about = "Steered-state distinguishability, quantum discord, and its upper bound for two-qubit states",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Analyze one state file (JSON rho or Bloch shape); report to stdout.
    Analyze {
        /// Path to the state file.
        file: PathBuf,
        /// Also write the canonical ellipsoid as a one-row CSV.
        #[arg(long)]
        ellipsoid_csv: Option<PathBuf>,
    },
    /// Conditional-entropy / distance surface of a Bell-diagonal state.
    Surface {
        /// Correlation diagonal, e.g. '-0.5,0.7,0.5'.
        #[arg(long, allow_hyphen_values = true)]
        t: String,
        /// Grid resolution: grid x 2*grid points over theta x phi.
        #[arg(long, default_value_t = 64)]
        grid: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Discord vs upper bound over a sampled state family.
    Scatter {
        #[arg(long)]
        category: Category,
        #[arg(long)]
        count: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Sweep the two-parameter family at fixed b.
    Twoparam {
        #[arg(long, allow_hyphen_values = true)]
        b: f64,
        #[arg(long, default_value_t = 101)]
        steps: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Dump sampled states as JSON lines (one Bloch state per line).
    Sample {
        #[arg(long)]
        category: Category,
        #[arg(long)]
        count: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Debug)]
enum CliError {
    Parse(String),
    NonPhysical(String),
    Numeric(String),
    Io(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Parse(_) => 2,
            CliError::NonPhysical(_) => 3,
            CliError::Numeric(_) => 4,
            CliError::Io(_) => 1,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Parse(m) | CliError::NonPhysical(m) | CliError::Numeric(m) | CliError::Io(m) => m,
        }
    }
}

fn classify_state_error(e: &StateError) -> CliError {
    match e {
        StateError::NotHermitian { .. }
        | StateError::NotUnitTrace { .. }
        | StateError::NonPhysical { .. } => CliError::NonPhysical(e.to_string()),
        StateError::SingularFilter { .. } => CliError::Numeric(e.to_string()),
    }
}

impl From<IoError> for CliError {
    fn from(e: IoError) -> Self {
        match &e {
            IoError::Parse(_) => CliError::Parse(e.to_string()),
            IoError::State(se) => classify_state_error(se),
            IoError::Io(_) => CliError::Io(e.to_string()),
        }
    }
}

impl From<ExperimentError> for CliError {
    fn from(e: ExperimentError) -> Self {
        match &e {
            ExperimentError::BadInput(_) => CliError::Parse(e.to_string()),
            ExperimentError::State(se) => classify_state_error(se),
            ExperimentError::Correlation(ce) => match ce {
                CorrelationError::OutOfDomain { .. } => CliError::Parse(e.to_string()),
                CorrelationError::State(se) => classify_state_error(se),
                _ => CliError::Numeric(e.to_string()),
            },
            ExperimentError::Sample(_) | ExperimentError::Steer(_) => {
                CliError::Numeric(e.to_string())
            }
        }
    }
}

fn write_file(path: &PathBuf, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn parse_triple(text: &str) -> Result<(f64, f64, f64), CliError> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(CliError::Parse(format!(
            "expected 't1,t2,t3', got '{text}'"
        )));
    }
    let mut vals = [0.0; 3];
    for (i, p) in parts.iter().enumerate() {
        vals[i] = p
            .parse::<f64>()
            .map_err(|e| CliError::Parse(format!("bad component '{p}': {e}")))?;
    }
    Ok((vals[0], vals[1], vals[2]))
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Analyze {
            file,
            ellipsoid_csv,
        } => {
            let state = load_state(&file)?;
            let report = analyze(&state)?;
            println!(
                "{}",
                serde_json::to_string_pretty(&report)
                    .map_err(|e| CliError::Io(e.to_string()))?
            );
            if let Some(path) = ellipsoid_csv {
                let canonical =
                    to_canonical(&state).map_err(|e| classify_state_error(&e))?;
                let e = canonical_ellipsoid(&canonical)
                    .map_err(|e| CliError::Numeric(e.to_string()))?;
                let csv = format!("{}\n{}\n", ellipsoid_csv_header(), ellipsoid_csv_row(&e));
                write_file(&path, &csv)?;
            }
            Ok(())
        }
        Command::Surface { t, grid, out } => {
            let t = parse_triple(&t)?;
            let rows = surface(t, grid)?;
            write_file(&out, &surface_csv(&rows))
        }
        Command::Scatter {
            category,
            count,
            seed,
            out,
        } => {
            let (rows, summary) = scatter(category, count, seed)?;
            write_file(&out, &scatter_csv(&rows, &summary))
        }
        Command::Twoparam { b, steps, out } => {
            let (rows, interval) = two_param_sweep(b, steps)?;
            write_file(&out, &two_param_csv(&rows, &interval))
        }
        Command::Sample {
            category,
            count,
            seed,
            out,
        } => {
            let states = sample(&SamplerConfig {
                seed,
                category,
                count,
            })
            .map_err(|e| CliError::Numeric(e.to_string()))?;
            let mut text = String::new();
            for s in &states {
                text.push_str(&state_json_line(s));
                text.push('\n');
            }
            write_file(&out, &text)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.exit_code())
        }
    }
}
