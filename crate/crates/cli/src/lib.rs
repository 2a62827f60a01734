//! Command-line front end for `fermicloud`.

pub mod commands;
pub mod config;
pub mod error;

use std::io::Write;

use clap::{Parser, Subcommand};

use crate::config::{resolve, CommandName, Flags};
use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "fermicloud",
    version,
    about = "Steady states of self-gravitating particle clouds"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Mass–density curve on a log-spaced density grid.
    MassCurve(Flags),
    /// Phase portrait of a single trajectory.
    Phase(Flags),
    /// Number of central densities carrying a given mass.
    Multiplicity(Flags),
    /// Gaps between Fermi–Dirac and Maxwell–Boltzmann trajectories along an η ladder.
    Converge(Flags),
    /// Compares the shooting result with a direct integration in the radius.
    Crosscheck(Flags),
}

impl Command {
    fn split(&self) -> (CommandName, &Flags) {
        match self {
            Self::MassCurve(f) => (CommandName::MassCurve, f),
            Self::Phase(f) => (CommandName::Phase, f),
            Self::Multiplicity(f) => (CommandName::Multiplicity, f),
            Self::Converge(f) => (CommandName::Converge, f),
            Self::Crosscheck(f) => (CommandName::Crosscheck, f),
        }
    }
}

/// Resolves the configuration, runs the command and writes its artifact to
/// the requested file or to standard output.
pub fn run(cli: &Cli) -> Result<(), CliError> {
    let (name, flags) = cli.command.split();
    let cfg = resolve(name, flags)?;
    let outcome = commands::execute(&cfg)?;
    match &cfg.out {
        Some(path) => {
            std::fs::write(path, outcome.artifact.as_bytes())?;
            println!("{}", outcome.summary);
            println!("wrote {}", path.display());
        }
        None => {
            std::io::stdout().write_all(outcome.artifact.as_bytes())?;
            eprintln!("{}", outcome.summary);
        }
    }
    Ok(())
}
