use std::process::ExitCode;

use clap::Parser;
use gapclique_cli::{run_and_emit, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    ExitCode::from(run_and_emit(&cli))
}
