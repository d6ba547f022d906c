//! `dicke`: command-line front end.
//!
//! Exit codes: 0 success, 2 configuration error, 3 numerical failure.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod args;
mod commands;
mod config;
mod error;

use std::ffi::OsString;
use std::process::ExitCode;

use clap::Parser;

use crate::args::Cli;
use crate::error::CliError;

fn parse(args: &[OsString]) -> Cli {
    Cli::try_parse_from(args).unwrap_or_else(|e| e.exit())
}

fn run() -> Result<(), CliError> {
    let args: Vec<OsString> = std::env::args_os().collect();
    let mut cli = parse(&args);
    if let Some(path) = cli.command.common().config.clone() {
        cli = parse(&config::splice(&args, config::read_flags(&path)?));
    }
    if let Some(threads) = cli.command.common().threads {
        if threads == 0 {
            return Err(CliError::Config("threads must be >= 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| CliError::Config(e.to_string()))?;
    }
    commands::run(&cli.command)
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("dicke: {e}");
            e.exit_code()
        }
    }
}
