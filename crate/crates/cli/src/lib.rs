//! Library half of the `boxhunt` binary: argument types, the subcommands,
//! and CSV/JSON rendering.

pub mod args;
pub mod commands;
pub mod output;
pub mod range;
pub mod verify;

use std::fmt;

use args::{Cli, Command};

/// Exit status for a run that completed but failed a check.
pub const EXIT_FAILURE: i32 = 2;
pub const EXIT_USAGE: i32 = 1;

#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    /// Bad flags or an invalid configuration.
    Usage(String),
    /// A tolerance could not be met.
    Failed(String),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Failed(_) => EXIT_FAILURE,
            CliError::Usage(_) | CliError::Io(_) => EXIT_USAGE,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "error: {m}"),
            CliError::Failed(m) => write!(f, "failed: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<boxhunt_core::Error> for CliError {
    fn from(e: boxhunt_core::Error) -> Self {
        match e {
            boxhunt_core::Error::QuadratureTolerance { .. } => CliError::Failed(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

/// Rendered output of one subcommand.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub body: String,
    /// Diagnostics for standard error.
    pub notes: Vec<String>,
    /// False when a check failed; the body is still written.
    pub passed: bool,
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        if self.passed {
            0
        } else {
            EXIT_FAILURE
        }
    }
}

pub fn run(cli: &Cli) -> Result<Outcome, CliError> {
    let format = cli.output.format;
    match &cli.command {
        Command::Bounds { k } => commands::bounds(&k.values(), format),
        Command::Exact(a) => commands::exact(a, format),
        Command::Simulate(a) => commands::simulate(a, format),
        Command::Opt(a) => commands::opt(a, format),
        Command::Verify(a) => verify::run(a, format),
    }
}

/// Runs `cli` and writes the result; returns the process exit code.
pub fn execute(cli: &Cli) -> i32 {
    let outcome = match run(cli) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("{e}");
            return e.exit_code();
        }
    };
    for note in &outcome.notes {
        eprintln!("{note}");
    }
    match output::write(&cli.output, cli.command.name(), &outcome.body) {
        Ok(()) => outcome.exit_code(),
        Err(e) => {
            eprintln!("{e}");
            e.exit_code()
        }
    }
}
