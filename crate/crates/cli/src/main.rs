//! `vacdisp`: simulate and bound frequency-dependent vacuum dispersion
//! with two-color laser-ranging scenarios.

mod commands;
mod error;
mod report;
mod scenario;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "vacdisp",
    version,
    about = "Two-color laser-ranging simulator and k' estimator for vacuum dispersion studies"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Deterministic delays and the k' sensitivity coefficient for a scenario
    Delay {
        #[arg(long)]
        scenario: PathBuf,
    },
    /// Synthesize a two-channel photon event set and write it as CSV
    Simulate {
        #[arg(long)]
        scenario: PathBuf,
        /// Event CSV output path
        #[arg(long)]
        out: PathBuf,
        /// Overrides the seed in the scenario file
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Estimate the differential delay from an event CSV and invert it to k'
    Infer {
        #[arg(long)]
        scenario: PathBuf,
        /// Event CSV produced by `simulate` (or following its schema)
        #[arg(long)]
        events: PathBuf,
        /// Confidence multiplier for the reported interval
        #[arg(long, default_value_t = 1.0)]
        z: f64,
    },
    /// Map the minimum detectable k' over a jitter x photon-count grid
    Sweep {
        #[arg(long)]
        scenario: PathBuf,
        /// Sweep CSV output path
        #[arg(long)]
        out: PathBuf,
        /// Detector jitter grid, picoseconds, comma separated
        #[arg(long = "jitter-ps", value_delimiter = ',', required = true)]
        jitter_ps: Vec<f64>,
        /// Photons-per-channel grid, comma separated
        #[arg(long, value_delimiter = ',', required = true)]
        photons: Vec<u64>,
        /// Confidence multiplier defining "detectable"
        #[arg(long, default_value_t = 1.0)]
        z: f64,
    },
    /// Recompute headline detectability figures and flag them against
    /// commonly quoted values
    Audit,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Delay { scenario } => commands::cmd_delay(scenario),
        Command::Simulate {
            scenario,
            out,
            seed,
        } => commands::cmd_simulate(scenario, out, *seed),
        Command::Infer {
            scenario,
            events,
            z,
        } => commands::cmd_infer(scenario, events, *z),
        Command::Sweep {
            scenario,
            out,
            jitter_ps,
            photons,
            z,
        } => commands::cmd_sweep(scenario, out, jitter_ps, photons, *z),
        Command::Audit => commands::cmd_audit(),
    };
    match result {
        Ok(report) => {
            print!("{report}");
            ExitCode::SUCCESS
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}
