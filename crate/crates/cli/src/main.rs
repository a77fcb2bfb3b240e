//! `resonator`: single factorizations, capacity sweeps and oracle
//! cross-checks from the command line.
//!
//! Exit status is 0 on success, 1 for runtime and I/O failures (and for a
//! wrong decode or oracle disagreement) and 2 for usage or validation errors.

mod args;
mod commands;
mod config;

use std::process::ExitCode;

use clap::{CommandFactory, Parser};

use args::{Cli, Command};

#[derive(Debug)]
pub enum Failure {
    /// Bad flags, configuration or hyperparameters.
    Usage(String),
    Runtime(anyhow::Error),
}

impl From<resonator::Error> for Failure {
    fn from(e: resonator::Error) -> Self {
        use resonator::Error as E;
        match e {
            E::InvalidArgument(_)
            | E::Config(_)
            | E::OracleCapExceeded { .. }
            | E::Parse { .. } => Failure::Usage(e.to_string()),
            E::InvalidState(_) | E::Io { .. } => Failure::Runtime(e.into()),
        }
    }
}

fn subcommand_name(c: &Command) -> &'static str {
    match c {
        Command::Factorize(_) => "factorize",
        Command::Sweep(_) => "sweep",
        Command::Capacity(_) => "capacity",
        Command::OracleCheck(_) => "oracle-check",
        Command::Presets(_) => "presets",
    }
}

fn init_logging(verbose: u8) {
    let level = match verbose {
        0 => "warn",
        1 => "info",
        2 => "debug",
        _ => "trace",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .format_timestamp(None)
        .init();
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    init_logging(cli.verbose);
    let outcome = match &cli.command {
        Command::Factorize(a) => commands::factorize(a),
        Command::Sweep(a) => commands::sweep(a),
        Command::Capacity(a) => commands::capacity(a),
        Command::OracleCheck(a) => commands::oracle_check(a),
        Command::Presets(a) => commands::presets(a),
    };
    match outcome {
        Ok(code) => code,
        Err(Failure::Usage(msg)) => {
            let name = subcommand_name(&cli.command);
            let mut cmd = Cli::command();
            cmd.build();
            let usage = cmd
                .find_subcommand_mut(name)
                .map(|c| c.render_usage().to_string())
                .unwrap_or_default();
            eprintln!(
                "error: {msg}\n\n{usage}\n\nFor more information, try 'resonator {name} --help'."
            );
            ExitCode::from(2)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
