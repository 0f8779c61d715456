use std::path::PathBuf;

use bkvg_core::BkvgError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),

    #[error("cannot read config {}: {source}", path.display())]
    ConfigRead {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("invalid config {}: {message}", path.display())]
    ConfigParse { path: PathBuf, message: String },

    #[error("cannot write {}: {source}", path.display())]
    Output {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error(transparent)]
    Core(#[from] BkvgError),
}

pub const EXIT_OK: u8 = 0;
pub const EXIT_VERIFY_FAILED: u8 = 1;
pub const EXIT_INVALID_INPUT: u8 = 2;
pub const EXIT_CERTIFICATION: u8 = 3;

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) | CliError::ConfigRead { .. } | CliError::ConfigParse { .. } => EXIT_INVALID_INPUT,
            CliError::Output { .. } => EXIT_INVALID_INPUT,
            CliError::Core(e) => match e {
                BkvgError::InvalidGamma(_)
                | BkvgError::DomainViolation(_)
                | BkvgError::InvalidMesh(_)
                | BkvgError::WrongRegime
                | BkvgError::WrongFamily(_)
                | BkvgError::NotAccretive(_)
                | BkvgError::NotClosable(_)
                | BkvgError::FamilyMismatch
                | BkvgError::NotApplicable(_) => EXIT_INVALID_INPUT,
                BkvgError::UncertifiedConstants(_)
                | BkvgError::NonIntegrable(_)
                | BkvgError::NonIntegrableHint(_)
                | BkvgError::NoConvergence { .. }
                | BkvgError::NotInKernel
                | BkvgError::SolveFailure(_)
                | BkvgError::EigenFailure(_) => EXIT_CERTIFICATION,
            },
        }
    }
}
