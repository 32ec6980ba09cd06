use entrate_core::Error as CoreError;

/// Command failure, grouped by exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Model or argument rejected. Exit 2.
    #[error("{0}")]
    Invalid(String),
    /// A computation broke down. Exit 3.
    #[error("{0}")]
    Numerical(String),
    /// Unreadable or malformed input. Exit 4.
    #[error("{0}")]
    Input(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Invalid(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Input(_) => 4,
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        let msg = e.to_string();
        match e {
            CoreError::Dimension(_)
            | CoreError::NonStochastic { .. }
            | CoreError::EntryOutOfRange { .. }
            | CoreError::EpsilonOutOfRange { .. }
            | CoreError::SingularE0 { .. }
            | CoreError::TooLarge { .. }
            | CoreError::ParameterOutOfRange { .. } => CliError::Invalid(msg),
            CoreError::SymbolOutOfRange { .. } | CoreError::EmptySequence => CliError::Input(msg),
            CoreError::SingularSystem { .. }
            | CoreError::Singular { .. }
            | CoreError::ZeroNormalizer
            | CoreError::NoConvergence { .. }
            | CoreError::GammaNotContracting { .. }
            | CoreError::RankDeficient { .. }
            | CoreError::ZeroLikelihood { .. } => CliError::Numerical(msg),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
