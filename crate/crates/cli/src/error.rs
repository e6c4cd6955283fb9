use std::path::Path;

use thiserror::Error;

/// Exit codes for errors; verdict codes are 0, 1 and 2.
pub mod exit {
    pub const USAGE: i32 = 10;
    pub const INPUT: i32 = 11;
    pub const RESOURCE_CAP: i32 = 12;
    pub const UNKNOWN_POINT: i32 = 13;
    pub const PRECONDITION: i32 = 14;
    pub const INTERNAL: i32 = 15;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error("line {line}, column {column}: {message}")]
    Schema {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{file}:{line}:{column}: {message}")]
    SchemaInFile {
        file: String,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("unknown point \"{name}\" (available: {})", available.join(", "))]
    UnknownPoint { name: String, available: Vec<String> },
    #[error(transparent)]
    Core(#[from] discone_core::Error),
}

impl CliError {
    pub fn in_file(self, path: &Path) -> Self {
        match self {
            CliError::Schema { line, column, message } => CliError::SchemaInFile {
                file: path.display().to_string(),
                line,
                column,
                message,
            },
            other => other,
        }
    }

    pub fn exit_code(&self) -> i32 {
        use discone_core::Error as E;
        match self {
            CliError::Usage(_) => exit::USAGE,
            CliError::Io { .. } | CliError::Schema { .. } | CliError::SchemaInFile { .. } => exit::INPUT,
            CliError::UnknownPoint { .. } => exit::UNKNOWN_POINT,
            CliError::Core(e) => match e {
                E::ResourceCap { .. } => exit::RESOURCE_CAP,
                E::Invariant(_) => exit::INTERNAL,
                E::Syntax { .. } | E::VariableOutOfRange { .. } | E::InvalidProblem(_) | E::Dimension(_) => exit::INPUT,
                E::NotInSet | E::Infeasible | E::Precondition(_) => exit::PRECONDITION,
            },
        }
    }
}
