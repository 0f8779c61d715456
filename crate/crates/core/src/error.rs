use thiserror::Error;

/// Errors raised by the core library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum BkvgError {
    #[error("non-integrable product: Re(conj(a) + b) = {0} <= -1")]
    NonIntegrable(f64),

    #[error("domain violation: {0}")]
    DomainViolation(String),

    #[error("quadrature did not converge after {subdivisions} panels (error estimate {error_estimate:e})")]
    NoConvergence {
        subdivisions: usize,
        error_estimate: f64,
    },

    #[error("singular exponent hint {0} <= -1 makes the integrand non-integrable")]
    NonIntegrableHint(f64),

    #[error("gamma must be positive and finite, got {0}")]
    InvalidGamma(f64),

    #[error("vector is not in the span of the plus kernel")]
    NotInKernel,

    #[error("operation requires the two-dimensional kernel regime (gamma < sqrt 3)")]
    WrongRegime,

    #[error("operation not defined for the {0} family")]
    WrongFamily(&'static str),

    #[error("boundary value solve failed: {0}")]
    SolveFailure(String),

    #[error("closed-form constants failed oracle certification: {0}")]
    UncertifiedConstants(String),

    #[error("extension is not accretive (margin {0})")]
    NotAccretive(f64),

    #[error("real-part form of the extension is not closable (margin {0})")]
    NotClosable(f64),

    #[error("extensions belong to different family instances")]
    FamilyMismatch,

    #[error("not applicable: {0}")]
    NotApplicable(String),

    #[error("eigenvalue computation failed: {0}")]
    EigenFailure(String),

    #[error("invalid mesh: {0}")]
    InvalidMesh(String),
}

pub type Result<T> = std::result::Result<T, BkvgError>;
