//! `staeckel`: run the verification suite on a Stäckel system given as a TOML
//! spec or as a gallery case.
//!
//! Exit codes: 0 when every selected check passes, 1 when a check fails or
//! cannot be evaluated, 2 for usage errors and unreadable input.

mod commands;
mod spec;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(
    name = "staeckel",
    version,
    about = "Verify Stäckel systems, their quantization and separation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run classical and quantum consistency checks.
    Verify {
        #[command(flatten)]
        system: SystemArgs,
        /// Run every check (the default when no --check is given).
        #[arg(long, conflicts_with = "check")]
        all: bool,
        /// Run only the named checks.
        #[arg(long, value_enum)]
        check: Vec<Check>,
    },
    /// Solve the separated equations and verify the product eigenfunction.
    Separate {
        #[command(flatten)]
        system: SystemArgs,
        /// Energies E_1,…,E_n, overriding the spec.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        energy: Option<Vec<f64>>,
        /// RK4 steps per axis.
        #[arg(long, default_value_t = 256)]
        steps: usize,
        /// Write one `axisK.csv` per axis into this directory.
        #[arg(long)]
        export: Option<PathBuf>,
    },
    /// Pretty-print a stored JSON report.
    Report { path: PathBuf },
    /// List the built-in gallery families.
    GalleryList,
}

#[derive(Args)]
pub struct SystemArgs {
    /// TOML system description.
    #[arg(long, conflicts_with = "case", required_unless_present = "case")]
    pub spec: Option<PathBuf>,
    /// Gallery case such as `vandermonde:3`.
    #[arg(long)]
    pub case: Option<String>,
    /// One tolerance for every check.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Sample points per zero test.
    #[arg(long)]
    pub samples: Option<usize>,
    /// RNG seed for sampling and random test functions.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Also write the machine-readable report here.
    #[arg(long)]
    pub json: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Check {
    Involution,
    Eq6,
    Commute,
    Selfadjoint,
    Benenti,
}

impl Check {
    pub const ALL: [Check; 5] = [
        Check::Involution,
        Check::Eq6,
        Check::Commute,
        Check::Selfadjoint,
        Check::Benenti,
    ];
}

fn configure_threads() {
    let Ok(value) = std::env::var("STAECKEL_THREADS") else {
        return;
    };
    match value.trim().parse::<usize>() {
        Ok(k) if k > 0 => {
            if let Err(e) = rayon::ThreadPoolBuilder::new()
                .num_threads(k)
                .build_global()
            {
                eprintln!("warning: STAECKEL_THREADS ignored: {e}");
            }
        }
        _ => eprintln!("warning: STAECKEL_THREADS={value} is not a positive integer, ignored"),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    configure_threads();
    let code = match cli.command {
        Command::Verify { system, all, check } => {
            let implicit = all || check.is_empty();
            let checks = if implicit { Check::ALL.to_vec() } else { check };
            commands::verify(&system, &checks, implicit)
        }
        Command::Separate {
            system,
            energy,
            steps,
            export,
        } => commands::separate(&system, energy, steps, export.as_deref()),
        Command::Report { path } => commands::report(&path),
        Command::GalleryList => commands::gallery_list(),
    };
    ExitCode::from(code)
}
