//! Command-line driver for dumbbell-swimmer encounters.
//!
//! Exit codes: 0 on success, 2 for configuration problems, 3 for numeric
//! failures during a run.

mod commands;
mod config;
mod output;

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{resolve, MediumKind, ModelKind, Overrides, Scenario};

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Numeric(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) | CliError::Numeric(m) => f.write_str(m),
        }
    }
}

#[derive(Parser)]
#[command(
    name = "swim",
    about = "Hydrodynamic encounters of dumbbell microswimmers",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate a pair encounter and write the trajectory.
    Run(CommonArgs),
    /// Sample the fluid velocity on a grid around swimmer 1.
    Field(CommonArgs),
    /// Repeat a run over a parameter range.
    Sweep(SweepArgs),
    /// Report steady headings of the mirror configuration.
    Steady(SteadyArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// Configuration file (key = value sections; all keys optional).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Initial arrangement preset.
    #[arg(long)]
    scenario: Option<Scenario>,
    /// Fluid environment.
    #[arg(long)]
    medium: Option<MediumKind>,
    /// Rate model: direct solver or far-field expansion.
    #[arg(long)]
    model: Option<ModelKind>,
    /// Truncation order of the expansion model.
    #[arg(long)]
    order: Option<u32>,
    /// Propulsion-point offset in half-lengths.
    #[arg(long, allow_hyphen_values = true)]
    zeta: Option<f64>,
    /// Initial center separation.
    #[arg(long)]
    a0: Option<f64>,
    /// Outer time step.
    #[arg(long)]
    dt: Option<f64>,
    /// Integration horizon.
    #[arg(long)]
    tmax: Option<f64>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Swept parameter as key=start:stop:step (keys: zeta, delta0, a0).
    #[arg(long)]
    sweep: String,
}

#[derive(Args)]
struct SteadyArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Report the vanishing-interaction limit instead of the finite-range
    /// scan.
    #[arg(long)]
    eps_zero: bool,
}

fn overrides_of(args: &CommonArgs) -> Overrides {
    Overrides {
        scenario: args.scenario,
        medium: args.medium,
        model: args.model,
        order: args.order,
        zeta: args.zeta,
        a0: args.a0,
        dt: args.dt,
        t_max: args.tmax,
        out: args.out.clone(),
    }
}

fn load_config(args: &CommonArgs) -> Result<config::RunConfig, CliError> {
    let text = match &args.config {
        Some(path) => Some(std::fs::read_to_string(path).map_err(|e| {
            CliError::Config(format!("cannot read {}: {e}", path.display()))
        })?),
        None => None,
    };
    resolve(text.as_deref(), &overrides_of(args))
}

fn dispatch(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Run(args) => commands::cmd_run(&load_config(args)?),
        Command::Field(args) => commands::cmd_field(&load_config(args)?),
        Command::Sweep(args) => {
            let spec = commands::parse_sweep(&args.sweep)?;
            commands::cmd_sweep(&load_config(&args.common)?, &spec)
        }
        Command::Steady(args) => {
            commands::cmd_steady(&load_config(&args.common)?, args.eps_zero)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                CliError::Config(_) => ExitCode::from(2),
                CliError::Numeric(_) => ExitCode::from(3),
            }
        }
    }
}
