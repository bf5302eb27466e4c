mod args;
mod config;
mod denoise;
mod error;
mod output;
mod reference;
mod simulate;

use std::process::ExitCode;

use clap::Parser;

use crate::args::{Cli, Command};
use crate::error::{CliError, CliResult};

fn configure_threads(threads: Option<usize>) -> CliResult<()> {
    if let Some(n) = threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::usage(format!("cannot start {n} worker threads: {e}")))?;
    }
    Ok(())
}

fn run(cli: Cli) -> CliResult<()> {
    configure_threads(cli.threads)?;
    match &cli.command {
        Command::Denoise(a) => denoise::run(a),
        Command::RuleCurve(a) => reference::rule_curve_cmd(a),
        Command::Risk(a) => reference::risk_cmd(a),
        Command::BayesRisk(a) => reference::bayes_risk_cmd(a),
        Command::Simulate(a) => simulate::run(a),
    }
}

fn main() -> ExitCode {
    // clap exits with 2 on usage errors and 0 for --help / --version
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
