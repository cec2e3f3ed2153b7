use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Malformed config, node file or flag value.
    #[error("{0}")]
    Parse(String),

    #[error("{0}")]
    Core(#[from] riesz_core::Error),

    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn parse(msg: impl Into<String>) -> Self {
        CliError::Parse(msg.into())
    }

    /// 3 for numerical failures, 2 for everything the caller got wrong.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) if e.is_numeric() => 3,
            _ => 2,
        }
    }
}
