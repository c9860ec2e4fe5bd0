//! `recovtsp` command-line tool.
//!
//! Exit codes: 0 success, 1 invalid input or infeasible request, 2 a violated
//! internal certificate.

mod experiment;
mod generate;
mod solve;
mod validate;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Deserialize;

#[derive(Parser)]
#[command(
    name = "recovtsp",
    version,
    about = "Recoverable robust TSP solvers and experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a generated instance file.
    Generate {
        #[command(subcommand)]
        kind: generate::Kind,
    },
    /// Solve an instance file and write the solution.
    Solve(SolveArgs),
    /// Check metrics, and optionally a solution or a tight-family certificate.
    Validate(validate::Args),
    /// Run a JSON-configured batch and write a CSV report.
    Experiment(experiment::Args),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    Approx4,
    Enum2,
    Oracle,
    RecovSt,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Approx4 => "approx4",
            Algorithm::Enum2 => "enum2",
            Algorithm::Oracle => "oracle",
            Algorithm::RecovSt => "recov-st",
        }
    }
}

#[derive(clap::Args)]
pub struct SolveArgs {
    /// Instance file.
    pub instance: PathBuf,
    #[arg(short, long, value_enum, default_value = "approx4")]
    pub algorithm: Algorithm,
    /// Where to write the solution file.
    #[arg(short, long)]
    pub out: Option<PathBuf>,
    /// Replay the pipeline with a seeded traversal order.
    #[arg(long)]
    pub adversarial_seed: Option<u64>,
    /// Accept matrices that violate the triangle inequality.
    #[arg(long)]
    pub force_nonmetric: bool,
    /// Search-node or candidate budget.
    #[arg(long)]
    pub budget: Option<u128>,
    /// Skip certificate checks. Timing runs only; the output is untrusted.
    #[arg(long)]
    pub no_verify: bool,
}

/// 2 if a certificate was violated anywhere in the error chain, else 1.
fn exit_code(err: &anyhow::Error) -> u8 {
    let violated = err.chain().any(|e| {
        matches!(
            e.downcast_ref::<recovtsp::Error>(),
            Some(recovtsp::Error::Certificate(_))
        )
    });
    if violated {
        2
    } else {
        1
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Generate { kind } => generate::run(kind),
        Command::Solve(args) => solve::run(&args),
        Command::Validate(args) => validate::run(&args),
        Command::Experiment(args) => experiment::run(&args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
