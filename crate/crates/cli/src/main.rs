use std::panic;
use std::process::ExitCode;

use clap::Parser;

use byzagg_cli::{run, Cli, EXIT_FAILED};

fn main() -> ExitCode {
    let cli = Cli::parse();
    // a violated internal assertion is a failed run, not a crash
    let code = panic::catch_unwind(|| run(&cli)).unwrap_or(EXIT_FAILED);
    ExitCode::from(code as u8)
}
