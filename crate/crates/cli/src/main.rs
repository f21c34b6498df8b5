//! `resiliency`: simulate failure histories, fit models to event logs, and
//! report reactive resiliency, performance trajectories and scenario risk.

mod commands;
mod config;
mod error;
mod io;
mod spec;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{Report, RunContext};
use config::Config;
use error::{exit, CliError, CliResult};

#[derive(Debug, Parser)]
#[command(name = "resiliency", version, about, long_about = None)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// TOML configuration file.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Override one configuration key; repeatable.
    #[arg(long = "set", global = true, value_name = "SECTION.KEY=VALUE")]
    set: Vec<String>,

    /// Directory for output files.
    #[arg(long, global = true, value_name = "DIR", default_value = ".")]
    out: PathBuf,

    /// Random seed; overrides `sim.seed`. Defaults to 42, `-1` draws one
    /// from the operating system.
    #[arg(long, global = true, allow_negative_numbers = true)]
    seed: Option<i64>,

    /// Print nothing on success.
    #[arg(long, global = true)]
    quiet: bool,

    /// Worker threads for Monte Carlo simulation (default: all cores).
    /// Results do not depend on this.
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,
}

#[derive(Debug, Clone, Copy, Subcommand)]
enum Command {
    /// Simulate failure/repair histories, or summary curves over many of them.
    Simulate,
    /// Fit candidate models to an event log and rank them by AIC.
    Fit,
    /// Reactive resiliency and degree of every mission event.
    Resiliency,
    /// Performance trajectory of one failure and recovery, as CSV.
    Trajectory,
    /// Scenario risk, system risk and the reliability proxy of a portfolio.
    Risk,
}

fn run(cli: &Cli) -> CliResult<Report> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::Config("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(format!("--threads {n}: {e}")))?;
    }
    let ctx = RunContext {
        config: Config::load(cli.config.as_deref(), &cli.set)?,
        seed: cli.seed,
    };
    match cli.command {
        Command::Simulate => commands::simulate::run(&ctx),
        Command::Fit => commands::fit::run(&ctx),
        Command::Resiliency => commands::resiliency::run(&ctx),
        Command::Trajectory => commands::trajectory::run(&ctx),
        Command::Risk => commands::risk::run(&ctx),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = run(&cli).and_then(|report| {
        for w in &report.warnings {
            eprintln!("warning: {w}");
        }
        let written = report.outputs.commit(&cli.out)?;
        Ok((report.lines, written))
    });
    match result {
        Ok((lines, written)) => {
            if !cli.quiet {
                for l in lines {
                    println!("{l}");
                }
                for p in written {
                    println!("wrote {}", p.display());
                }
            }
            ExitCode::from(exit::OK)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
