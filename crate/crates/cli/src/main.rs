use std::process::ExitCode;

use clap::Parser;
use osccomp_cli::{execute, Cli};

fn main() -> ExitCode {
    ExitCode::from(execute(Cli::parse()))
}
