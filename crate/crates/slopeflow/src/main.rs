//! `slopeflow` command-line entry point.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use slopeflow::commands::{self, Overrides};
use slopeflow::Result;

#[derive(Parser)]
#[command(name = "slopeflow", version, about = "Steady and transient groundwater flow over an inclined bed")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Shooting solve, oracle comparison and a priori bounds.
    Steady(RunArgs),
    /// Diffusion coefficient and Green's function of the linearized problem (p > 2).
    Green(RunArgs),
    /// Explicit time integration from the configured initial thickness.
    Transient(RunArgs),
    /// Theorem suite on a scenario file or a directory of scenarios.
    Verify(RunArgs),
    /// Steady solve and theorem suite over the (p, phi, amplitude) grid.
    Sweep(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Scenario JSON file (`verify` also accepts a directory).
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overrides SLOPEFLOW_OUT and the config.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Number of grid cells.
    #[arg(long)]
    grid: Option<usize>,
    /// Seed of the randomized checks.
    #[arg(long)]
    seed: Option<u64>,
}

impl RunArgs {
    fn overrides(&self) -> Overrides {
        Overrides { out: self.out.clone(), grid: self.grid, seed: self.seed }
    }
}

fn single(args: &RunArgs, run: fn(&slopeflow::ScenarioConfig, &std::path::Path) -> Result<()>) -> Result<()> {
    let ov = args.overrides();
    let cfg = commands::load(&args.config, &ov)?;
    run(&cfg, &commands::output_dir(Some(&cfg), &ov))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Steady(a) => single(a, commands::cmd_steady),
        Command::Green(a) => single(a, commands::cmd_green),
        Command::Transient(a) => single(a, commands::cmd_transient),
        Command::Sweep(a) => single(a, commands::cmd_sweep),
        Command::Verify(a) => commands::cmd_verify(&a.config, &a.overrides()),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("slopeflow: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
