//! `dyadic`: batch front end for weight and symbol generation, Bellman
//! certificate sweeps, inequality checks and operator-norm scans.
//!
//! Exit status: 0 when every executed check passes, 1 when a check fails,
//! 2 for bad flags or unusable input, 3 when the norm estimator does not
//! converge.

mod args;
mod commands;
mod output;
mod run_config;

use std::process::ExitCode;

use clap::Parser;
use env_logger::Env;

use crate::args::Cli;

fn main() -> ExitCode {
    env_logger::Builder::from_env(Env::default().default_filter_or("info"))
        .format_timestamp(None)
        .init();

    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };

    match commands::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            if let Some(msg) = failure.message() {
                eprintln!("error: {msg}");
            }
            ExitCode::from(failure.exit_code())
        }
    }
}

