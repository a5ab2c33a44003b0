//! Command-line front end for the `byzagg` simulator.
//!
//! `byzagg agree|eval|learn --config <file>` and `byzagg repro <name>`.
//! Exit codes: 0 success, 1 failed check or runtime error, 2 configuration
//! error.

pub mod commands;
pub mod config;
pub mod output;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use commands::{CmdError, Report};
use config::{ConfigError, ExperimentConfig, OutputSection};

#[derive(Debug, Parser)]
#[command(name = "byzagg", version, about = "Byzantine-tolerant aggregation and approximate agreement experiments")]
pub struct Cli {
    /// Suppress progress output.
    #[arg(long, global = true)]
    pub quiet: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one agreement simulation and export its per-round trace.
    Agree(RunArgs),
    /// Sweep seeded instances and report approximation ratios.
    Eval(RunArgs),
    /// Run a named worst-case reproduction.
    Repro(ReproArgs),
    /// Run a collaborative learning experiment.
    Learn(RunArgs),
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[arg(long)]
    pub config: PathBuf,
    /// Overrides the config seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Overrides `[output] dir`.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ReproArgs {
    pub name: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Also write a JSON report here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

fn load(args: &RunArgs) -> Result<ExperimentConfig, ConfigError> {
    let mut cfg = config::load_config(&args.config)?;
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    if let Some(o) = &args.out {
        cfg.output = Some(OutputSection { dir: Some(o.clone()) });
    }
    Ok(cfg)
}

/// Applies `BYZAGG_THREADS` to the global worker pool.
pub fn configure_threads() -> Result<(), ConfigError> {
    let Ok(v) = std::env::var("BYZAGG_THREADS") else {
        return Ok(());
    };
    let n: usize = match v.trim().parse() {
        Ok(n) if n > 0 => n,
        _ => {
            return Err(ConfigError {
                problems: vec![("BYZAGG_THREADS".into(), format!("expected a positive integer, got {v:?}"))],
            })
        }
    };
    // a second call in the same process keeps the first pool
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

/// Runs a parsed command line and returns the exit code.
pub fn run(cli: &Cli) -> i32 {
    let result = configure_threads().map_err(CmdError::from).and_then(|()| execute(&cli.command));
    match result {
        Ok((report, dir)) => {
            if let Some(dir) = dir {
                if let Err(e) = report.artifacts.write_all(&dir) {
                    eprintln!("error: cannot write to {}: {e}", dir.display());
                    return EXIT_FAILED;
                }
            }
            if !cli.quiet {
                for l in &report.lines {
                    println!("{l}");
                }
            }
            if report.passed {
                EXIT_OK
            } else {
                EXIT_FAILED
            }
        }
        Err(e) => {
            eprintln!("{e}");
            match e {
                CmdError::Config(_) => EXIT_CONFIG,
                CmdError::Runtime(_) => EXIT_FAILED,
            }
        }
    }
}

fn execute(cmd: &Command) -> Result<(Report, Option<PathBuf>), CmdError> {
    match cmd {
        Command::Agree(a) => {
            let plan = config::agree_plan(&load(a)?)?;
            Ok((commands::agree(&plan)?, Some(plan.out)))
        }
        Command::Eval(a) => {
            let plan = config::eval_plan(&load(a)?)?;
            Ok((commands::eval(&plan)?, Some(plan.out)))
        }
        Command::Learn(a) => {
            let plan = config::learn_plan(&load(a)?)?;
            Ok((commands::learn(&plan)?, Some(plan.out)))
        }
        Command::Repro(r) => Ok((commands::repro(&r.name, r.seed)?, r.out.clone())),
    }
}

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/cli.md")]
mod book_cli {}
