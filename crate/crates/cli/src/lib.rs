//! Command-line front end for `bilocal-core`: state files in, reports out.

pub mod commands;
pub mod error;
pub mod report;
pub mod state;

use std::ffi::OsString;
use std::path::PathBuf;

use bilocal_core::monogamy::Assignment;
use clap::{Parser, Subcommand, ValueEnum};

use crate::commands::{MonogamyArgs, Outcome, Suite, SweepArgs, SWEEP_MU0};
use crate::error::{CliError, CliResult};
use crate::report::{now_timestamp, render, Format, Report};
use crate::state::{load_file, load_generated, LoadedState};

#[derive(Debug, Parser)]
#[command(name = "bilocal", version, about = "Bilocality and monogamy checks for two-source qubit networks")]
pub struct Cli {
    /// Emit the report as JSON.
    #[arg(long, global = true, conflicts_with = "csv")]
    pub json: bool,
    /// Emit the report as key,value CSV.
    #[arg(long, global = true)]
    pub csv: bool,
    /// Tolerance for bound checks; each command has its own default.
    #[arg(long, global = true, value_name = "T", allow_negative_numbers = true)]
    pub tol: Option<f64>,
    /// Seed for every randomized step.
    #[arg(long, global = true, env = "BILOCAL_SEED", default_value_t = 0, value_name = "S")]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepParam {
    Mu1,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Correlation tensor, Gram spectrum, Horodecki M and maximal CHSH of a
    /// two-qubit state.
    Tensor {
        #[arg(required_unless_present = "state", conflicts_with = "state")]
        file: Option<PathBuf>,
        /// Built-in state: bell, ghz, w:MU0,MU1, mixed or random:SEED.
        #[arg(long)]
        state: Option<String>,
    },
    /// Monogamy report for a four-party network built from two three-qubit
    /// sources.
    Monogamy {
        /// State files for the A,B,C source and the B,C,D source.
        #[arg(num_args = 0..=2)]
        files: Vec<PathBuf>,
        /// Built-in state; give it once to use it for both sources.
        #[arg(long, num_args = 1)]
        state: Vec<String>,
        /// Party owning each qubit of the first source.
        #[arg(long = "assign-1", default_value = "abc")]
        assign_1: String,
        /// Party owning each qubit of the second source.
        #[arg(long = "assign-2", default_value = "bcd")]
        assign_2: String,
        /// Also maximize over measurement settings, shared and free.
        #[arg(long)]
        optimize: bool,
        #[arg(long, default_value_t = 32)]
        restarts: usize,
    },
    /// Tabulate the W-state network over a parameter range into a CSV file.
    Sweep {
        #[arg(long, value_enum)]
        param: SweepParam,
        #[arg(long, allow_negative_numbers = true)]
        from: f64,
        #[arg(long, allow_negative_numbers = true)]
        to: f64,
        #[arg(long)]
        steps: usize,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = SWEEP_MU0)]
        mu0: f64,
        #[arg(long = "assign-2", default_value = "bdc")]
        assign_2: String,
        /// Add a column with the optimized shared-settings value.
        #[arg(long = "shared-opt")]
        shared_opt: bool,
        #[arg(long, default_value_t = 32)]
        restarts: usize,
    },
    /// Run a randomized property suite.
    Verify {
        #[arg(value_enum)]
        suite: Suite,
        #[arg(long, default_value_t = 100)]
        count: usize,
        /// Optimizer restarts (horodecki suite).
        #[arg(long, default_value_t = 32)]
        restarts: usize,
    },
    /// Write a seeded random state file.
    Random {
        #[arg(long, default_value_t = 3)]
        qubits: usize,
        /// Rank of the mixed state; 1 writes a pure ket.
        #[arg(long, default_value_t = state::RANDOM_RANK)]
        rank: usize,
        #[arg(long)]
        out: PathBuf,
    },
}

fn load(file: Option<&PathBuf>, spec: Option<&str>, qubits: usize) -> CliResult<LoadedState> {
    match (file, spec) {
        (Some(f), None) => load_file(f),
        (None, Some(s)) => load_generated(s, qubits),
        _ => Err(CliError::Parse("give either a state file or --state".into())),
    }
}

fn monogamy_sources(files: &[PathBuf], states: &[String]) -> CliResult<(LoadedState, LoadedState)> {
    let mut loaded = Vec::new();
    for f in files {
        loaded.push(load_file(f)?);
    }
    for s in states {
        loaded.push(load_generated(s, 3)?);
    }
    if files.is_empty() && states.len() == 1 {
        loaded.push(loaded[0].clone());
    }
    match <[LoadedState; 2]>::try_from(loaded) {
        Ok([a, b]) => Ok((a, b)),
        Err(v) => Err(CliError::Parse(format!(
            "monogamy needs two sources, got {}",
            v.len()
        ))),
    }
}

fn execute(cli: &Cli) -> CliResult<Outcome> {
    let seed = cli.seed;
    match &cli.command {
        Command::Tensor { file, state } => {
            commands::tensor(&load(file.as_ref(), state.as_deref(), 2)?)
        }
        Command::Monogamy {
            files,
            state,
            assign_1,
            assign_2,
            optimize,
            restarts,
        } => {
            let (abc, bcd) = monogamy_sources(files, state)?;
            let args = MonogamyArgs {
                assign_1: Assignment::parse(assign_1)?,
                assign_2: Assignment::parse(assign_2)?,
                optimize: *optimize,
                restarts: *restarts,
                seed,
                tol: cli.tol,
            };
            commands::monogamy(&abc, &bcd, &args)
        }
        Command::Sweep {
            param: SweepParam::Mu1,
            from,
            to,
            steps,
            out,
            mu0,
            assign_2,
            shared_opt,
            restarts,
        } => commands::sweep(&SweepArgs {
            from: *from,
            to: *to,
            steps: *steps,
            out,
            mu0: *mu0,
            assign_2: Assignment::parse(assign_2)?,
            shared_opt: *shared_opt,
            restarts: *restarts,
            seed,
            tol: cli.tol,
        }),
        Command::Verify {
            suite,
            count,
            restarts,
        } => commands::verify(*suite, *count, seed, cli.tol, *restarts),
        Command::Random { qubits, rank, out } => commands::random(*qubits, *rank, seed, out),
    }
}

/// Runs the tool on `args` (program name first), printing the report to
/// stdout and diagnostics to stderr. Returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let format = if cli.json {
        Format::Json
    } else if cli.csv {
        Format::Csv
    } else {
        Format::Text
    };
    match execute(&cli) {
        Ok(outcome) => {
            let mut command: Vec<String> = args
                .iter()
                .map(|a| a.to_string_lossy().into_owned())
                .collect();
            if let Some(first) = command.first_mut() {
                *first = report::TOOL.to_string();
            }
            let report = Report {
                command,
                seed: Some(cli.seed),
                inputs: outcome.inputs,
                results: outcome.results,
            };
            print!("{}", render(&report.to_value(&now_timestamp()), format));
            match outcome.violation {
                Some(msg) => {
                    let e = CliError::Violation(msg);
                    eprintln!("bound violated: {e}");
                    e.exit_code()
                }
                None => 0,
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
