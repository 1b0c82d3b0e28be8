//! `lsg`: classification, plane-wave experiments, grid evolution and regime
//! scans for linearised SG/QG dynamics around quadratic steady states.
//!
//! Exit codes: 0 success, 1 invalid input, 2 degenerate flow, 3 time clamp.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use lsg_core::Error;

use commands::Status;
use config::{Flags, RunConfig};

#[derive(Parser, Debug)]
#[command(name = "lsg", version, about = "Linearised semi-/quasi-geostrophic stability and evolution")]
struct Cli {
    /// TOML file with the same keys as the long flags; flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Print the effective configuration as TOML and exit.
    #[arg(long, global = true)]
    show_config: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Joint SG/QG regime report for one matrix.
    Classify(Flags),
    /// Plane-wave trajectory and stability verdict.
    Planewave(Flags),
    /// Grid evolution of a field under G(t), with diagnostics.
    Evolve(Flags),
    /// Quadrant histogram over random positive-definite matrices.
    Scan(Flags),
    /// SG and QG plane-wave verdicts side by side.
    QgCompare(Flags),
}

const EXIT_INPUT: u8 = 1;
const EXIT_DEGENERATE: u8 = 2;
const EXIT_CLAMP: u8 = 3;

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::DegenerateFlow { .. } => EXIT_DEGENERATE,
        Error::TimeClamp { .. } => EXIT_CLAMP,
        _ => EXIT_INPUT,
    }
}

type Handler = fn(&RunConfig) -> Result<Status, Error>;

fn run(cli: Cli) -> Result<Status, Error> {
    let (flags, cmd): (Flags, Handler) = match cli.command {
        Command::Classify(f) => (f, commands::classify),
        Command::Planewave(f) => (f, commands::planewave),
        Command::Evolve(f) => (f, commands::evolve),
        Command::Scan(f) => (f, commands::scan),
        Command::QgCompare(f) => (f, commands::qg_compare),
    };
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    cfg.apply(flags)?;
    cfg.validate()?;
    if cli.show_config {
        print!("{}", cfg.to_toml());
        return Ok(Status::Ok);
    }
    cmd(&cfg)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(EXIT_INPUT),
            };
        }
    };
    match run(cli) {
        Ok(Status::Ok) => ExitCode::SUCCESS,
        Ok(Status::Degenerate) => {
            eprintln!("lsg: flow is degenerate (mu within the degeneracy threshold)");
            ExitCode::from(EXIT_DEGENERATE)
        }
        // A closed reader (`lsg scan | head`) is not an error.
        Err(Error::Io(msg)) if msg.contains("Broken pipe") => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("lsg: error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
