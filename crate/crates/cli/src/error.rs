use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage error: {0}")]
    Usage(String),

    #[error(transparent)]
    Numeric(#[from] spinshift::Error),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("validation failed: {0}")]
    Validation(String),
}

impl CliError {
    /// 0 success, 1 usage, 2 numerical convergence, 3 validation failure.
    pub fn exit_code(&self) -> u8 {
        use spinshift::Error as E;
        match self {
            CliError::Usage(_) | CliError::Io(_) => 1,
            CliError::Numeric(
                E::Domain { .. }
                | E::Resolution { .. }
                | E::RelativisticLimit
                | E::DegenerateMomentum,
            ) => 1,
            CliError::Numeric(_) => 2,
            CliError::Validation(_) => 3,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
