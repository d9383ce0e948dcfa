use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Bad geometry: empty or inverted intervals, zero cells, mismatched axes.
    #[error("invalid domain: {0}")]
    Domain(String),

    /// A parameter violates a documented precondition (CFL band, viscosity band, ...).
    #[error("invalid parameter: {0}")]
    Validation(String),

    /// Externally supplied data is missing or inconsistent.
    #[error("input data: {0}")]
    InputData(String),

    #[error("numerical consistency: {0}")]
    Numerical(String),

    /// A decay bound was requested for a setup the bound does not cover.
    #[error("theorem preconditions unmet: {0}")]
    PreconditionsUnmet(String),

    #[error("undefined order of convergence: {0}")]
    UndefinedOrder(String),

    #[error("config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Errors that can be detected before any time step is taken.
    pub fn is_setup_error(&self) -> bool {
        matches!(
            self,
            Error::Domain(_)
                | Error::Validation(_)
                | Error::Config(_)
                | Error::PreconditionsUnmet(_)
        )
    }
}
