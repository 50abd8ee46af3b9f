use std::path::PathBuf;
use std::process::ExitCode;

use boucwen::app::{run, Command, Options};
use boucwen::ground_motion::Units;
use clap::{Parser, Subcommand, ValueEnum};

/// Bouc-Wen hysteresis analyses: response simulation, insensitivity
/// sweeps, ground-motion synthesis, C_R spectra and filter-based
/// identification.
#[derive(Parser)]
#[command(version, about)]
struct Cli {
    /// JSON configuration for the subcommand; defaults are used when absent.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides the seed of commands that draw random numbers.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for parallel fan-out (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[arg(long, global = true, default_value = ".")]
    out_dir: PathBuf,
    /// Units of acceleration in record files.
    #[arg(long, global = true, value_enum, default_value_t = UnitArg::Si)]
    units: UnitArg,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum UnitArg {
    Si,
    G,
}

#[derive(Subcommand)]
enum Cmd {
    /// Time-history response of an oscillator or shear chain.
    Simulate,
    /// Deviation metrics over a perturbation grid.
    Sweep,
    /// Synthetic accelerograms from the evolutionary spectrum.
    Groundmotion,
    /// Inelastic displacement ratio spectra of supplied records.
    Cr,
    /// One joint state-parameter estimation run.
    Identify,
    /// Seeded campaign of estimation runs.
    Montecarlo,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(j) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(j).build_global() {
            eprintln!("error: --jobs: {e}");
            return ExitCode::from(2);
        }
    }
    let command = match cli.command {
        Cmd::Simulate => Command::Simulate,
        Cmd::Sweep => Command::Sweep,
        Cmd::Groundmotion => Command::GroundMotion,
        Cmd::Cr => Command::Cr,
        Cmd::Identify => Command::Identify,
        Cmd::Montecarlo => Command::MonteCarlo,
    };
    let opts = Options {
        config: cli.config,
        seed: cli.seed,
        out_dir: cli.out_dir,
        units: match cli.units {
            UnitArg::Si => Units::Si,
            UnitArg::G => Units::G,
        },
    };
    match run(command, &opts) {
        Ok(paths) => {
            for p in paths {
                println!("{}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
