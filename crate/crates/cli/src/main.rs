//! `cr3bp`: command-line front end for the planar restricted three-body toolkit.

mod commands;
mod config;
mod output;

use clap::{Args, Parser, Subcommand, ValueEnum};
use config::Validation;
use cr3bp_core::Cr3bpError;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(
    name = "cr3bp",
    version,
    about = "Planar circular restricted three-body computations"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// JSON config file with a `version` field; flags override its values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Write the main output here instead of stdout.
    #[arg(long, short, global = true)]
    pub out: Option<PathBuf>,
    /// Also write the data table to this CSV file.
    #[arg(long, global = true)]
    pub csv: Option<PathBuf>,
    /// Format of the main output.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Worker threads for grid scans (default: logical cores).
    #[arg(long, global = true, env = "CR3BP_THREADS")]
    pub threads: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Lagrange points l1..l5 and critical values L1..L5.
    Lagrange(commands::LagrangeArgs),
    /// Shooting curves Γ1, Γ2 and the retrograde orbit at their crossing.
    Shoot(commands::ShootArgs),
    /// Lyapunov orbit at energy L1 + eps.
    Lyapunov(commands::LyapunovArgs),
    /// Robbin–Salamon / Conley–Zehnder index of a sampled path or an orbit.
    Index(commands::IndexArgs),
    /// Scan of det U_W over the Hill region of the μ = ½ regularized problem.
    Convexity(commands::ConvexityArgs),
    /// Grid positivity suite and transcription self-test for I₀ > 0.
    Appendixb(commands::AppendixbArgs),
    /// Transversality of the interpolated Liouville field.
    Liouville(commands::LiouvilleArgs),
    /// Shield profile r(s) and accumulated area a(s).
    Shield(commands::ShieldArgs),
}

fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<Validation>().is_some() {
        return 2;
    }
    match err.downcast_ref::<Cr3bpError>() {
        Some(Cr3bpError::InvalidParameter { .. }) => 2,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
