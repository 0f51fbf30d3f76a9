use thiserror::Error;

use crate::instance_file::ParseError;

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const OTHER: i32 = 1;
    pub const USAGE: i32 = 2;
    pub const PARSE: i32 = 3;
    pub const INFEASIBLE: i32 = 4;
    pub const GUARD: i32 = 5;
    pub const MISMATCH: i32 = 6;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error at {0}")]
    Parse(#[from] ParseError),

    #[error(transparent)]
    Solver(#[from] wdm_revenue::Error),

    #[error("{0} reproduction check(s) failed")]
    Mismatch(usize),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => exit::USAGE,
            CliError::Io { .. } | CliError::Parse(_) => exit::PARSE,
            CliError::Solver(e) => match e {
                wdm_revenue::Error::Argument(_) => exit::USAGE,
                wdm_revenue::Error::Infeasible(_) => exit::INFEASIBLE,
                wdm_revenue::Error::TooLarge { .. } => exit::GUARD,
                wdm_revenue::Error::Numeric { .. } => exit::OTHER,
            },
            CliError::Mismatch(_) => exit::MISMATCH,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
