use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Invalid or inconsistent configuration; exit code 2.
    #[error("configuration error: {0}")]
    Config(String),

    /// A run failed or aborted; exit code 3.
    #[error("run aborted: {0}")]
    Runtime(#[from] nodeqmc::error::Error),

    #[error("output error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Runtime(_) | CliError::Io(_) => 3,
        }
    }
}
