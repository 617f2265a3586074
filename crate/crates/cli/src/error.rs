use std::fmt;

use cssball_core::Error;

#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    Usage(String),
    Numerical(String),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Io(_) => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Numerical(m) => write!(f, "numerical failure: {m}"),
            CliError::Io(m) => write!(f, "io error: {m}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let message = e.to_string();
        match e {
            Error::Domain { .. }
            | Error::NoLimitSolution { .. }
            | Error::Ansatz(_)
            | Error::Parse(_) => CliError::Usage(message),
            Error::Io { .. } => CliError::Io(message),
            Error::Quadrature { .. } | Error::Solver { .. } | Error::Field(_) => {
                CliError::Numerical(message)
            }
        }
    }
}
