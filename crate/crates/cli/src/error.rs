use std::fmt;

use vacrc::Error;

/// Closed set of machine-readable failure codes and their exit statuses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorCode {
    Config,
    Io,
    Domain,
    NoDecay,
    Internal,
    IntegrationFail,
    ConfigLimit,
}

impl ErrorCode {
    pub fn as_str(&self) -> &'static str {
        match self {
            ErrorCode::Config => "CONFIG",
            ErrorCode::Io => "IO",
            ErrorCode::Domain => "DOMAIN",
            ErrorCode::NoDecay => "NO_DECAY",
            ErrorCode::Internal => "INTERNAL",
            ErrorCode::IntegrationFail => "INTEGRATION_FAIL",
            ErrorCode::ConfigLimit => "CONFIG_LIMIT",
        }
    }

    pub fn exit_status(&self) -> i32 {
        match self {
            ErrorCode::Config | ErrorCode::Io => 2,
            ErrorCode::Domain | ErrorCode::NoDecay | ErrorCode::Internal => 3,
            ErrorCode::IntegrationFail => 4,
            ErrorCode::ConfigLimit => 5,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CliError {
    pub code: ErrorCode,
    pub message: String,
}

impl CliError {
    pub fn config(message: impl Into<String>) -> Self {
        Self {
            code: ErrorCode::Config,
            message: message.into(),
        }
    }

    pub fn io(message: impl Into<String>) -> Self {
        Self {
            code: ErrorCode::Io,
            message: message.into(),
        }
    }
}

impl fmt::Display for CliError {
    /// One line: `error[CODE]: message`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let msg = self.message.replace('\n', " ");
        write!(f, "error[{}]: {msg}", self.code.as_str())
    }
}

impl std::error::Error for CliError {}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::NonFinite { .. } | Error::Dimension { .. } | Error::FractionalDimension { .. } | Error::Domain(_) => {
                ErrorCode::Domain
            }
            Error::NoDecay(_) => ErrorCode::NoDecay,
            Error::IntegrationFailure { .. } => ErrorCode::IntegrationFail,
            Error::Config(_) => ErrorCode::Config,
            Error::ResourceLimit { .. } => ErrorCode::ConfigLimit,
            Error::InternalConsistency(_) => ErrorCode::Internal,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}
