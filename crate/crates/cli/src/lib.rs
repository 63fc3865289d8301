//! Pipeline driver for the gapclique reductions.
//!
//! Every command produces an optional artifact (an instance, a graph or a
//! witness in the core text formats) and a [`Report`].

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use gapclique_core::Error;
use thiserror::Error;

pub mod config;
mod oracle;
mod reduce;
pub mod report;
mod verify;

pub use config::{stream_seed, ConfigArgs, PipelineConfig};
pub use report::Report;

pub const EXIT_OK: u8 = 0;
pub const EXIT_OTHER: u8 = 1;
pub const EXIT_PARSE: u8 = 2;
pub const EXIT_BUDGET: u8 = 3;
pub const EXIT_VERIFY: u8 = 4;
pub const EXIT_SAMPLING: u8 = 5;

#[derive(Parser, Debug)]
#[command(
    name = "gapclique",
    version,
    about = "Reductions from 3SAT to gap clique problems, with exact checkers"
)]
pub struct Cli {
    #[command(flatten)]
    pub config: ConfigArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run one reduction step on an input file.
    Reduce {
        chain: Chain,
        input: PathBuf,
        /// Also write the disperser used by `compress`.
        #[arg(long = "disperser-out")]
        disperser_out: Option<PathBuf>,
    },
    /// Check an artifact (and, for `witness`, a witness against it).
    Verify {
        target: VerifyTarget,
        #[arg(required = true, num_args = 1..=2)]
        files: Vec<PathBuf>,
    },
    /// Solve a small instance exactly.
    Oracle { problem: Problem, input: PathBuf },
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Chain {
    Sat2vs,
    Vs2clique,
    Amplify,
    Clique2biclique,
    Compress,
    Biclique2densest,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerifyTarget {
    Instance,
    Graph,
    Disperser,
    Witness,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Problem {
    Sat,
    Vectorsum,
    Clique,
    Biclique,
    Densest,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(e) => match e {
                Error::Parse { .. } => EXIT_PARSE,
                Error::BudgetExceeded { .. } => EXIT_BUDGET,
                Error::VerificationFailed(_) => EXIT_VERIFY,
                Error::SamplingFailed { .. } => EXIT_SAMPLING,
                _ => EXIT_OTHER,
            },
            CliError::Usage(_) => EXIT_PARSE,
            CliError::Io { .. } => EXIT_OTHER,
        }
    }
}

/// Result of one command.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub artifact: Option<String>,
    pub report: Report,
    pub code: u8,
}

impl Outcome {
    fn ok(artifact: Option<String>, report: Report) -> Self {
        Outcome {
            artifact,
            report,
            code: EXIT_OK,
        }
    }
}

pub(crate) fn read_file(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub(crate) fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Oracle searches that run out of nodes are refused, not reported as
/// partial answers.
pub(crate) fn search_budget(exact: bool, nodes: u64, budget: u64) -> Result<(), CliError> {
    if exact {
        Ok(())
    } else {
        Err(Error::BudgetExceeded {
            what: "oracle search nodes".into(),
            required: nodes as u128 + 1,
            budget: budget as u128,
        }
        .into())
    }
}

/// Runs a parsed command line.
pub fn execute(cli: &Cli) -> Result<Outcome, CliError> {
    let cfg = PipelineConfig::from_args(cli.config.clone())?;
    match &cli.command {
        Command::Reduce {
            chain,
            input,
            disperser_out,
        } => reduce::run(&cfg, *chain, input, disperser_out.as_deref()),
        Command::Verify { target, files } => verify::run(&cfg, *target, files),
        Command::Oracle { problem, input } => oracle::run(&cfg, *problem, input),
    }
}

/// Runs a command and writes its outputs: with `--out` the artifact goes
/// to that file and the report to stdout, otherwise the artifact goes to
/// stdout and the report to stderr. Returns the exit code.
pub fn run_and_emit(cli: &Cli) -> u8 {
    match execute(cli) {
        Ok(outcome) => {
            let report = outcome.report.to_string();
            match (&cli.config.out, &outcome.artifact) {
                (Some(path), artifact) => {
                    if let Err(e) = write_file(path, artifact.as_deref().unwrap_or("")) {
                        eprintln!("error: {e}");
                        return e.exit_code();
                    }
                    print!("{report}");
                }
                (None, Some(artifact)) => {
                    print!("{artifact}");
                    eprint!("{report}");
                }
                (None, None) => print!("{report}"),
            }
            outcome.code
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
