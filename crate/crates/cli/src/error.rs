use spectre_core::SpectreError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error(transparent)]
    Core(#[from] SpectreError),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("serialization error: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    /// 1 verification failure, 2 invalid input, 3 numerical non-convergence.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Core(e) if e.is_non_convergence() => 3,
            CliError::Core(
                SpectreError::ParameterOutOfRange { .. }
                | SpectreError::NonFiniteParameter(_)
                | SpectreError::InvalidArgument(_)
                | SpectreError::IndexOutOfRange { .. }
                | SpectreError::OutOfDomain { .. },
            ) => 2,
            _ => 1,
        }
    }
}
