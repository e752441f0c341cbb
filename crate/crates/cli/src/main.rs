//! `qot`: batch runner for the String-QOT / QKD simulator.
//!
//! Exit status: 0 success, 1 usage or configuration error, 2 resource cap
//! or budget exceeded, 3 certificate failure.

use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod args;
mod commands;
mod output;

#[derive(Parser, Debug)]
#[command(name = "qot", version, about = "String-QOT / QKD simulator and verification runner")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run the protocol end to end and write transcripts plus a CSV summary.
    Simulate(commands::simulate::SimulateArgs),
    /// Certify that coset density matrices agree on low-distance subspaces.
    DensityCheck(commands::density::DensityArgs),
    /// Receiver attacks: information accounting and calibration tables.
    Attack(commands::attack::AttackArgs),
    /// Minimum distances of random codes against the entropy bound.
    CodeStats(commands::code_stats::CodeStatsArgs),
}

/// What a successful command reports back to `main`.
pub enum Outcome {
    Done,
    CertificateFailure,
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<qot_core::Error>() {
        Some(e) if e.is_resource() => 2,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = match cli.command {
        Command::Simulate(a) => commands::simulate::run(a),
        Command::DensityCheck(a) => commands::density::run(a),
        Command::Attack(a) => commands::attack::run(a),
        Command::CodeStats(a) => commands::code_stats::run(a),
    };
    match result {
        Ok(Outcome::Done) => ExitCode::SUCCESS,
        Ok(Outcome::CertificateFailure) => ExitCode::from(3),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
