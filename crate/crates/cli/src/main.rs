//! `netform` command-line harness.
//!
//! Exit status: 0 on success (or a converged run), 2 when dynamics stop at
//! the round cap without converging, 1 on usage or input errors.

mod args;
mod artifact;
mod batch;
mod commands;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use args::{AnalyzeArgs, BatchArgs, CensusArgs, ConvergeArgs, DynamicsArgs, GenerateArgs};

#[derive(Debug, Parser)]
#[command(name = "netform", version, about = "Speaking/listening network formation games")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build a graph from one of the canonical families.
    Generate(GenerateArgs),
    /// Run seeded edge or vertex dynamics from a graph file.
    Dynamics(DynamicsArgs),
    /// Stability, welfare, symmetry, clustering and diameter of a graph.
    Analyze(AnalyzeArgs),
    /// Enumerate every labeled graph on n vertices.
    Census(CensusArgs),
    /// Run a list of seeded dynamics trials from a TOML config.
    Batch(BatchArgs),
    /// Walk the constructive path to a stable directed graph.
    ConvergePath(ConvergeArgs),
}

/// Outcome of a successful command.
pub enum Status {
    Done,
    NotConverged,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Generate(a) => commands::generate(&a),
        Command::Dynamics(a) => commands::dynamics(&a),
        Command::Analyze(a) => commands::analyze(&a),
        Command::Census(a) => commands::census(&a),
        Command::Batch(a) => batch::run(&a),
        Command::ConvergePath(a) => commands::converge(&a),
    };
    match result {
        Ok(Status::Done) => ExitCode::SUCCESS,
        Ok(Status::NotConverged) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
