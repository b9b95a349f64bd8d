//! `cecl`: eye center localization from the command line.

mod commands;
mod options;

use std::process::ExitCode;

use clap::Parser;

use options::{Cli, Command};

/// How a command failed; decides the exit status.
#[derive(Debug)]
pub enum Failure {
    /// Bad or inconsistent arguments (exit 2).
    Usage(anyhow::Error),
    /// An input could not be read or parsed (exit 3).
    Input(anyhow::Error),
}

pub type Outcome<T = ()> = Result<T, Failure>;

pub fn usage(e: impl Into<anyhow::Error>) -> Failure {
    Failure::Usage(e.into())
}

pub fn input(e: impl Into<anyhow::Error>) -> Failure {
    Failure::Input(e.into())
}

/// The error and its causes, skipping causes whose text is already shown.
fn describe(e: &anyhow::Error) -> String {
    let mut out = String::new();
    for cause in e.chain() {
        let msg = cause.to_string();
        if out.contains(&msg) {
            continue;
        }
        if !out.is_empty() {
            out.push_str(": ");
        }
        out.push_str(&msg);
    }
    out
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Detect(a) => commands::detect(a),
        Command::Evaluate(a) => commands::evaluate(a),
        Command::Tune(a) => commands::tune(a),
        Command::Synth(a) => commands::synth(a),
        Command::Szp(a) => commands::szp(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(e)) => {
            eprintln!("error: {}", describe(&e));
            eprintln!("\nFor more information, try '--help'.");
            ExitCode::from(2)
        }
        Err(Failure::Input(e)) => {
            eprintln!("error: {}", describe(&e));
            ExitCode::from(3)
        }
    }
}
