//! `qms` — command-line runner for the qubit-measurement simulator.
//!
//! Three subcommands cover the two measurement models and their
//! cross-check: `tree` runs the detection cascade, `spin` runs the Ising
//! register (optionally optimizing its angles first), and `oracle`
//! compares the cascade circuit against dense Hamiltonian evolution.
//! Every run emits a single JSON or CSV report; seeded runs are exactly
//! reproducible from the echoed configuration.

mod oracle_cmd;
mod report;
mod spin_cmd;
mod tree_cmd;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use report::CliError;

#[derive(Parser)]
#[command(name = "qms", version, about = "Qubit-measurement simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Single-photon detection cascade on a binary tree.
    Tree(tree_cmd::TreeArgs),
    /// Ising spin-register measurement with variational angles.
    Spin(spin_cmd::SpinArgs),
    /// Dense Hamiltonian-evolution cross-check of the cascade.
    Oracle(oracle_cmd::OracleArgs),
}

/// Applies the `QMS_THREADS` override before any parallel region starts.
fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("QMS_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw.parse().ok().filter(|&t| t > 0).ok_or_else(|| {
        CliError::config(format!(
            "QMS_THREADS must be a positive integer, got {raw:?}"
        ))
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::config(format!("thread pool: {e}")))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let run = configure_threads().and_then(|()| match &cli.command {
        Command::Tree(args) => tree_cmd::run(args),
        Command::Spin(args) => spin_cmd::run(args),
        Command::Oracle(args) => oracle_cmd::run(args),
    });
    match run {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}
