//! Command-line front end: `gen`, `solve`, `bench` and `verify`.
//!
//! [`run`] takes argv and two writers and returns the process exit code, so
//! the binary and the tests share one entry point.

mod bench;
mod gen;
mod opts;
mod solve;
mod verify;

use std::ffi::OsString;
use std::io::Write;

use clap::Parser;

pub use opts::{Cli, Command};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug)]
pub enum CliError {
    /// Bad flags, unreadable or malformed input.
    Usage(String),
    /// Infeasible solution, broken invariant or solver failure.
    Violation(String),
}

impl CliError {
    pub fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Violation(_) => EXIT_VIOLATION,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Violation(m) => m,
        }
    }
}

pub type CliResult = Result<(), CliError>;

pub(crate) fn usage(msg: impl std::fmt::Display) -> CliError {
    CliError::Usage(msg.to_string())
}

pub(crate) fn violation(msg: impl std::fmt::Display) -> CliError {
    CliError::Violation(msg.to_string())
}

pub(crate) fn io_error(e: std::io::Error) -> CliError {
    CliError::Violation(format!("i/o error: {e}"))
}

/// Runs one command line and returns its exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let echo = args
        .iter()
        .skip(1)
        .map(|a| a.to_string_lossy().into_owned())
        .collect::<Vec<_>>()
        .join(" ");
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = if code == EXIT_OK {
                write!(out, "{e}")
            } else {
                write!(err, "{e}")
            };
            return code;
        }
    };
    let result = match &cli.command {
        Command::Gen(a) => gen::run(a, out),
        Command::Solve(a) => solve::run(a, &echo, out),
        Command::Bench(a) => bench::run(a, &echo, out),
        Command::Verify(a) => verify::run(a, out),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {}", e.message());
            e.code()
        }
    }
}
