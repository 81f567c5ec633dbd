use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("{0}")]
    AssertionFailed(String),
    #[error("internal error: {0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Domain(_) => 2,
            CliError::AssertionFailed(_) => 3,
            CliError::Internal(_) => 4,
        }
    }
}

impl From<squeeze_core::Error> for CliError {
    fn from(e: squeeze_core::Error) -> Self {
        match e {
            squeeze_core::Error::Domain(m) => CliError::Domain(m),
            other => CliError::Internal(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Internal(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Internal(e.to_string())
    }
}
