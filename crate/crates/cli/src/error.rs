use thiserror::Error;

/// Failure of a command, carrying the process exit code it maps to.
#[derive(Debug, Error)]
pub enum CliError {
    /// Malformed input or arguments.
    #[error("{0}")]
    Parse(String),
    /// Well-formed input that breaks a state invariant.
    #[error("{0}")]
    Invariant(String),
    /// A bound or property check failed.
    #[error("{0}")]
    Violation(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) => 2,
            CliError::Invariant(_) => 3,
            CliError::Violation(_) => 4,
            CliError::Io(_) => 5,
        }
    }
}

impl From<bilocal_core::Error> for CliError {
    fn from(e: bilocal_core::Error) -> Self {
        use bilocal_core::Error as E;
        let msg = e.to_string();
        match e {
            E::NotNormalized { .. }
            | E::NotHermitian { .. }
            | E::TraceNotOne { .. }
            | E::NotPositive { .. }
            | E::NonFinite
            | E::NotUnit { .. } => CliError::Invariant(msg),
            E::BadQubitCount(_)
            | E::BadIndex { .. }
            | E::NotSquare { .. }
            | E::WrongDimension { .. }
            | E::BadAssignment(_)
            | E::BadParameter(_) => CliError::Parse(msg),
            E::NoConvergence { .. } => CliError::Violation(msg),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
