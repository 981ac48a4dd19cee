//! Scenario-driven batch runner for `fracburgers`.
//!
//! A scenario file (see [`scenario`] for the grammar) selects an equation,
//! its parameters, a grid, initial data and the outputs wanted. [`run`]
//! executes it, writes `x,t,phi` tables and a JSON summary, and returns a
//! [`RunReport`]. [`sweep`] repeats a scenario over a list of orders.

use std::fmt;

pub mod io;
pub mod run;
pub mod scenario;

pub use run::{run, sweep, Comparison, Continuity, Residuals, RunReport, Summary, SweepReport};
pub use scenario::{parse_scenario, parse_scenario_file, ParseError, Scenario};

/// Failure of a CLI command, with the process exit code it maps to.
#[derive(Debug)]
pub enum CliError {
    /// Rejected scenario text.
    Config(ParseError),
    /// A valid scenario that cannot be run as given, e.g. a grid that does
    /// not fit the stability bound. Names the scenario key.
    Invalid { key: String, message: String },
    /// The numerics failed (blow-up, overflow, log domain).
    Numerical(fracburgers::Error),
    /// Any other library error.
    Library(fracburgers::Error),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Invalid { .. } | CliError::Library(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Io(_) => 1,
        }
    }

    pub(crate) fn invalid(key: &str, message: impl Into<String>) -> Self {
        CliError::Invalid {
            key: key.to_string(),
            message: message.into(),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(e) => write!(f, "{e}"),
            CliError::Invalid { key, message } => write!(f, "invalid value for `{key}`: {message}"),
            CliError::Numerical(e) => write!(f, "numerical failure: {e}"),
            CliError::Library(e) => write!(f, "{e}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<ParseError> for CliError {
    fn from(e: ParseError) -> Self {
        CliError::Config(e)
    }
}

impl From<fracburgers::Error> for CliError {
    fn from(e: fracburgers::Error) -> Self {
        match e {
            fracburgers::Error::InvalidStep { dt, bound } => CliError::invalid(
                "dt",
                format!("{dt} exceeds the stability bound dx^2/(4 alpha) = {bound}"),
            ),
            e if e.is_numerical() => CliError::Numerical(e),
            e => CliError::Library(e),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}
