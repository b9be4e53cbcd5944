use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Validation(String),

    #[error(transparent)]
    Core(#[from] qcomm::Error),

    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },

    #[error("internal invariant broken: {0}")]
    Invariant(String),
}

impl CliError {
    /// 2 validation, 3 resource cap, 4 internal invariant.
    pub fn exit_code(&self) -> u8 {
        use qcomm::Error as E;
        match self {
            CliError::Validation(_) | CliError::Io { .. } => 2,
            CliError::Core(E::Resource { .. }) => 3,
            CliError::Core(
                E::InvalidParameter { .. }
                | E::ArityMismatch { .. }
                | E::Parse(_)
                | E::QubitOutOfRange { .. }
                | E::DuplicateQubit(_)
                | E::DimensionMismatch { .. },
            ) => 2,
            CliError::Core(_) | CliError::Invariant(_) => 4,
        }
    }
}
