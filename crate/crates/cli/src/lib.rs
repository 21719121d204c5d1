//! Config-driven runner for subgradient experiments.
//!
//! `subgrad run` simulates each configured experiment into its own
//! directory, `subgrad diagnose` evaluates diagnostics on the stored
//! trajectory and `subgrad report` tabulates key results across runs.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod diagnose;
pub mod error;
pub mod manifest;
pub mod report;
pub mod run;

use std::path::PathBuf;

use clap::{Parser, Subcommand};

pub use config::ExperimentConfig;
pub use error::{exit, CliError, CliResult};
pub use manifest::Manifest;

#[derive(Debug, Parser)]
#[command(name = "subgrad", version, about = "Subgradient oscillation experiments")]
pub struct Cli {
    /// Worker threads; 0 uses every core.
    #[arg(long, global = true, default_value_t = 0)]
    pub jobs: usize,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run experiments, writing `<out>/<name>/{config.toml,trajectory.csv,manifest.json}`.
    Run {
        #[arg(required = true)]
        configs: Vec<PathBuf>,
        #[arg(short, long, default_value = "runs")]
        out: PathBuf,
        /// Store every k-th iterate, overriding the configs.
        #[arg(long)]
        thin: Option<usize>,
    },
    /// Evaluate diagnostics on stored runs.
    Diagnose {
        #[arg(required = true)]
        manifests: Vec<PathBuf>,
        /// Comma-separated diagnostic names.
        #[arg(long, value_delimiter = ',')]
        only: Option<Vec<String>>,
    },
    /// Tabulate key scalars of several runs.
    Report {
        manifests: Vec<PathBuf>,
        /// Also write the table as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

fn worst(codes: impl IntoIterator<Item = u8>) -> u8 {
    codes.into_iter().max().unwrap_or(exit::OK)
}

fn cmd_run(configs: &[PathBuf], out: &std::path::Path, jobs: usize, thin: Option<usize>) -> CliResult<u8> {
    let outcomes = run::run_all(configs, out, jobs, thin)?;
    let mut codes = Vec::new();
    for o in outcomes {
        match o {
            Ok(o) => {
                let note = match &o.manifest.divergence {
                    Some(d) => format!(" (diverged at iterate {})", d.index),
                    None => String::new(),
                };
                println!("{}{note}", o.manifest_path.display());
                codes.push(o.exit_code());
            }
            Err(e) => {
                eprintln!("error: {e}");
                codes.push(e.code);
            }
        }
    }
    Ok(worst(codes))
}

fn cmd_diagnose(manifests: &[PathBuf], only: Option<&[String]>, jobs: usize) -> CliResult<u8> {
    let mut codes = Vec::new();
    for m in manifests {
        let o = match diagnose::diagnose(m, only, jobs) {
            Ok(o) => o,
            Err(e) => {
                eprintln!("error: {}: {e}", m.display());
                codes.push(e.code);
                continue;
            }
        };
        for (name, s) in &o.summary {
            let verdict = serde_json::to_value(s.verdict).unwrap();
            println!("{}: {name}: {}: {}", m.display(), verdict.as_str().unwrap(), s.detail);
        }
        if let Some(e) = o.error {
            eprintln!("error: {}: {e}", m.display());
            codes.push(e.code);
        }
    }
    Ok(worst(codes))
}

fn cmd_report(manifests: &[PathBuf], csv: Option<&std::path::Path>) -> CliResult<u8> {
    let rows = report::collect(manifests)?;
    print!("{}", report::to_text(&rows));
    if let Some(path) = csv {
        std::fs::write(path, report::to_csv(&rows)).map_err(|e| CliError::io(path, e))?;
    }
    Ok(exit::OK)
}

/// Runs a parsed command line and returns the process exit code.
pub fn execute(cli: Cli) -> u8 {
    let r = match &cli.command {
        Command::Run { configs, out, thin } => cmd_run(configs, out, cli.jobs, *thin),
        Command::Diagnose { manifests, only } => cmd_diagnose(manifests, only.as_deref(), cli.jobs),
        Command::Report { manifests, csv } => cmd_report(manifests, csv.as_deref()),
    };
    r.unwrap_or_else(|e| {
        eprintln!("error: {e}");
        e.code
    })
}
