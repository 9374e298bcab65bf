use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Config does not match the documented schema.
    #[error("config error: {0}")]
    Schema(String),
    /// Bad flags, unreadable config, or refusal to overwrite.
    #[error("usage error: {0}")]
    Usage(String),
    #[error(transparent)]
    Model(#[from] jjsim_core::Error),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    /// 2 for anything the user must fix in the input, 3 for failures while computing or writing.
    pub fn exit_code(&self) -> i32 {
        use jjsim_core::Error as E;
        match self {
            CliError::Schema(_) | CliError::Usage(_) => 2,
            CliError::Model(E::Config(_) | E::Domain(_) | E::Precondition(_)) => 2,
            CliError::Model(_) | CliError::Io(_) => 3,
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}
