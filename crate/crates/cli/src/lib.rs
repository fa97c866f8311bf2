//! Command-line front end for `decoherence-core`.
//!
//! [`run`] is the whole program; the binary only forwards the process
//! arguments and exit code. Exit codes: 0 success, 1 verification failure,
//! 2 invalid input, 3 numerical non-convergence.

pub mod args;
pub mod commands;
pub mod config;
pub mod format;

use std::ffi::OsString;
use std::fmt;
use std::io::{self, Write};

use clap::error::ErrorKind;
use clap::Parser;

pub use args::Cli;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Core(decoherence_core::Error),
    VerificationFailed(usize),
    Io(io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use decoherence_core::Error as E;
        match self {
            CliError::VerificationFailed(_) => 1,
            CliError::Core(E::NonConvergence(_) | E::NonFiniteIntegrand { .. }) => 3,
            CliError::Usage(_) | CliError::Core(_) | CliError::Io(_) => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "{m}"),
            CliError::Core(e) => write!(f, "{e}"),
            CliError::VerificationFailed(n) => write!(f, "{n} verification check(s) failed"),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl From<decoherence_core::Error> for CliError {
    fn from(e: decoherence_core::Error) -> Self {
        CliError::Core(e)
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e)
    }
}

/// Parse `argv` (program name first) and execute. Reports and CSV without
/// `--out` go to `stdout`; diagnostics go to `stderr`.
pub fn run<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let expanded = match config::expand(argv) {
        Ok(a) => a,
        Err(e) => return report_error(&e, stderr),
    };
    let cli = match Cli::try_parse_from(expanded) {
        Ok(cli) => cli,
        Err(e) => {
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{}", e.render());
                    0
                }
                _ => {
                    let _ = write!(stderr, "{}", e.render());
                    2
                }
            };
        }
    };
    match commands::execute(&cli, stdout, stderr) {
        Ok(()) => 0,
        Err(e) => report_error(&e, stderr),
    }
}

fn report_error(e: &CliError, stderr: &mut dyn Write) -> i32 {
    let _ = writeln!(stderr, "error: {e}");
    e.exit_code()
}
