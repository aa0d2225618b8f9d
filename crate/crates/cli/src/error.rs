use thiserror::Error;

/// Failures of a command, each with its exit status.
#[derive(Debug, Error)]
pub enum CliError {
    /// unreadable or invalid configuration
    #[error("config error: {0}")]
    Config(String),
    #[error("resource cap reached: {0}")]
    Resource(String),
    #[error("{0}")]
    Run(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Resource(_) => 3,
            CliError::Run(_) | CliError::Io(_) => 1,
        }
    }

    /// Engine errors raised while building from a config are config errors.
    pub fn building(e: unispec::Error) -> Self {
        match e {
            unispec::Error::ResourceLimit { .. } => CliError::Resource(e.to_string()),
            e => CliError::Config(e.to_string()),
        }
    }
}

impl From<unispec::Error> for CliError {
    fn from(e: unispec::Error) -> Self {
        match e {
            unispec::Error::ResourceLimit { .. } => CliError::Resource(e.to_string()),
            e => CliError::Run(e.to_string()),
        }
    }
}
