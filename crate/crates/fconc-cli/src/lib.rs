//! Command implementations behind the `fconc` binary.

pub mod commands;
pub mod config;
pub mod csv;

use std::fmt;

pub use commands::{run, Command, Options, Output};
pub use config::ScenarioConfig;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_UNDECIDABLE: i32 = 2;
pub const EXIT_DOMAIN: i32 = 3;

#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    Config(String),
    Undecidable(String),
    Domain(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Undecidable(_) => EXIT_UNDECIDABLE,
            CliError::Domain(_) => EXIT_DOMAIN,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "config error: {m}"),
            CliError::Undecidable(m) => write!(f, "undecidable: {m}"),
            CliError::Domain(m) => write!(f, "domain failure: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<fconc::Error> for CliError {
    fn from(e: fconc::Error) -> Self {
        use fconc::Error as E;
        match e {
            E::InvalidParameter(_) | E::IncompatibleIntervals(_) | E::InconsistentScenario(_) | E::NotC2 => {
                CliError::Config(e.to_string())
            }
            E::Undecidable(_) => CliError::Undecidable(e.to_string()),
            _ => CliError::Domain(e.to_string()),
        }
    }
}
