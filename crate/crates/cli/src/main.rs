//! `osc2d`: spectra, periodic-orbit densities and verification runs for the
//! two-dimensional harmonic oscillator.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod args;
mod commands;
mod output;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use args::UsageError;

#[derive(Debug, Parser)]
#[command(
    name = "osc2d",
    version,
    about = "Periodic-orbit theory of the 2D harmonic oscillator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Exact levels with degeneracies and symmetry labels.
    Spectrum(commands::SpectrumArgs),
    /// Broadened exact and semiclassical densities of states.
    Dos(commands::DosArgs),
    /// Density of one symmetry sector of a commensurate oscillator.
    ReducedDos(commands::ReducedDosArgs),
    /// The three panels of the commensurate density decomposition.
    Figure3(commands::Figure3Args),
    /// Classical trajectory with action-angle variables and torus cells.
    Trajectory(commands::TrajectoryArgs),
    /// Bloch-sphere point of a state.
    Bloch(commands::BlochArgs),
    /// Run the invariant suites and print a JSON report.
    Verify(commands::VerifyArgs),
}

fn run(cli: &Cli) -> anyhow::Result<bool> {
    match &cli.command {
        Command::Spectrum(a) => commands::spectrum(a).map(|_| true),
        Command::Dos(a) => commands::dos(a).map(|_| true),
        Command::ReducedDos(a) => commands::reduced_dos(a).map(|_| true),
        Command::Figure3(a) => commands::figure3(a).map(|_| true),
        Command::Trajectory(a) => commands::trajectory(a).map(|_| true),
        Command::Bloch(a) => commands::bloch(a).map(|_| true),
        Command::Verify(a) => commands::verify(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) if e.is::<UsageError>() => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
