//! `twomatrix` command-line driver; see [`twomatrix::cli`] for the pipelines.

use clap::{Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;
use twomatrix::cli::{error_exit_code, run, Command, Config, Overrides};
use twomatrix::finite_n::Mode;

#[derive(Parser)]
#[command(name = "twomatrix", version, about = "Equilibrium measures, spectral curve and kernels of the quartic two-matrix model")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
    /// TOML configuration (defaults to V = x²/2, τ = 1)
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Output directory (overrides `out` in the config)
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Comma-separated matrix sizes, each a multiple of 3
    #[arg(long, global = true, value_delimiter = ',', value_name = "N,N,…")]
    n: Option<Vec<usize>>,
    /// Scaling regime of the universality comparison: bulk or edge
    #[arg(long, global = true, value_name = "bulk|edge")]
    mode: Option<String>,
    /// Mantissa bits of the finite-n computations
    #[arg(long, global = true, value_name = "BITS")]
    precision: Option<u32>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Solve the vector equilibrium problem and write the solution bundle
    Solve,
    /// Build the spectral curve and outer parametrix from a stored bundle
    Curve,
    /// Compute finite-n kernels and compare ρ_n with dμ₁/dx
    Kernel,
    /// Compare rescaled kernels with the sine or Airy limit
    Universality,
}

fn execute(cli: Cli) -> twomatrix::Result<twomatrix::cli::Outcome> {
    let base = match &cli.config {
        Some(path) => Config::load(path)?,
        None => Config::reference(),
    };
    let overrides = Overrides {
        out: cli.out,
        n: cli.n,
        mode: cli.mode.as_deref().map(str::parse::<Mode>).transpose()?,
        precision: cli.precision,
    };
    let cfg = base.with_overrides(&overrides)?;
    let command = match cli.command {
        Cmd::Solve => Command::Solve,
        Cmd::Curve => Command::Curve,
        Cmd::Kernel => Command::Kernel,
        Cmd::Universality => Command::Universality,
    };
    run(command, &cfg)
}

fn main() -> ExitCode {
    // Usage errors exit with 1 (exit code 2 is reserved for multi-cut).
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match execute(cli) {
        Ok(outcome) => {
            println!("{}", outcome.message);
            for f in &outcome.files {
                println!("wrote {}", f.display());
            }
            if outcome.status.exit_code() != 0 {
                eprintln!("status: {:?}", outcome.status);
            }
            ExitCode::from(outcome.status.exit_code())
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(error_exit_code(&e))
        }
    }
}
