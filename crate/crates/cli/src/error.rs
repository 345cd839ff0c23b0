use thiserror::Error;

/// Process exit codes.
pub mod exit {
    pub const SUCCESS: i32 = 0;
    pub const REPRODUCTION_FAILED: i32 = 1;
    pub const INPUT: i32 = 2;
    pub const COMPUTATION: i32 = 3;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("input error: {0}")]
    Input(String),
    #[error("computation error: {0}")]
    Computation(String),
    #[error("reproduction check failed: {0}")]
    Reproduction(String),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) | CliError::Io { .. } => exit::INPUT,
            CliError::Computation(_) => exit::COMPUTATION,
            CliError::Reproduction(_) => exit::REPRODUCTION_FAILED,
        }
    }

    pub fn input(msg: impl std::fmt::Display) -> Self {
        CliError::Input(msg.to_string())
    }
}
