use std::fmt;

/// CLI failures with their stable exit codes: 2 for input errors, 3 for
/// precondition violations, 1 otherwise.
#[derive(Debug)]
pub enum CliError {
    Input(String),
    Precondition(String),
    Other(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Precondition(_) => 3,
            CliError::Other(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(m) => write!(f, "input error: {m}"),
            CliError::Precondition(m) => write!(f, "precondition error: {m}"),
            CliError::Other(m) => write!(f, "error: {m}"),
        }
    }
}

impl From<qspec_core::Error> for CliError {
    fn from(e: qspec_core::Error) -> Self {
        match e {
            qspec_core::Error::InvalidInput(m) => CliError::Input(m),
            qspec_core::Error::Precondition(m) => CliError::Precondition(m),
            qspec_core::Error::Resource(m) => CliError::Other(m),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Input(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;
