use std::fmt;
use std::process::ExitCode;

use serde::Serialize;

#[derive(Debug)]
pub enum CliError {
    /// Arguments that parse but do not fit together. Exit code 2.
    Usage(String),
    /// Unreadable input or values outside the accepted domain. Exit code 3.
    Data(String),
    /// A statistic that is undefined for the given data. Exit code 4.
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            CliError::Usage(_) => 2,
            CliError::Data(_) => 3,
            CliError::Numerical(_) => 4,
        })
    }

    fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Data(_) => "data",
            CliError::Numerical(_) => "numerical",
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Data(m) | CliError::Numerical(m) => m,
        }
    }

    /// One-line JSON object for standard error.
    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Body<'a> {
            error: &'a str,
            message: &'a str,
        }
        serde_json::to_string(&Body {
            error: self.kind(),
            message: self.message(),
        })
        .expect("plain strings serialize")
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} error: {}", self.kind(), self.message())
    }
}

impl From<ir2_core::Error> for CliError {
    fn from(e: ir2_core::Error) -> Self {
        use ir2_core::Error as E;
        match e {
            E::DegenerateResponse(_) | E::Numerical(_) => CliError::Numerical(e.to_string()),
            E::Input(_) | E::InsufficientSample { .. } | E::UnknownModel(_) => {
                CliError::Data(e.to_string())
            }
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Data(e.to_string())
    }
}
