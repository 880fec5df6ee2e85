use thiserror::Error;

/// Failure classes of a run, each with its own exit status.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("resource cap: {0}")]
    Resource(String),
    #[error("assertion failed: {0}")]
    Assertion(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Assertion(_) => 1,
            CliError::Config(_) => 2,
            CliError::Resource(_) => 3,
        }
    }
}

impl From<addstruct::Error> for CliError {
    fn from(e: addstruct::Error) -> Self {
        use addstruct::Error as E;
        match e {
            E::SizeLimit { .. } | E::MemoryCap(_) | E::SearchCapExceeded(_) | E::OrderOverflow | E::Overflow(_) => {
                CliError::Resource(e.to_string())
            }
            E::NoJump { .. }
            | E::DensityGuaranteeFailed { .. }
            | E::InclusionFailed { .. }
            | E::HypothesisFailed(_)
            | E::RegularRadiusNotFound { .. }
            | E::Precision(_) => CliError::Assertion(e.to_string()),
            _ => CliError::Config(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Config(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;
