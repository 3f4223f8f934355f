use std::fmt;

use medsolve::Error;

/// Why a command stopped, and the exit code that goes with it.
#[derive(Debug)]
pub enum Failure {
    /// Malformed flags, files or game descriptions.
    Input(String),
    /// A solver or construction did not finish.
    Solver(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Input(_) => 2,
            Failure::Solver(_) => 3,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Input(msg) => write!(f, "input error: {msg}"),
            Failure::Solver(msg) => write!(f, "solver error: {msg}"),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse(_)
            | Error::InvalidGame(_)
            | Error::InvalidBelief(_)
            | Error::DimensionMismatch(_)
            | Error::UnknownFixture(_)
            | Error::NotBinary
            | Error::NotSingletonValued
            | Error::MissingReceiverValue
            | Error::Domain(_) => Failure::Input(e.to_string()),
            _ => Failure::Solver(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Input(e.to_string())
    }
}
