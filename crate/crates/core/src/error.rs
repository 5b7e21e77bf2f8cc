use thiserror::Error;

/// Errors raised by the geometry, classification and integration routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("matrix is not symmetric (relative asymmetry {0:e})")]
    NotSymmetric(f64),

    #[error("matrix has a non-finite entry")]
    NonFinite,

    #[error("{0}")]
    Domain(String),

    #[error("numerical degeneracy: {0}")]
    Numerical(String),

    #[error(
        "not a valid symplectic spectrum: eigenvalue {re:e}{im:+e}i has a non-negligible real part"
    )]
    InvalidSpectrum { re: f64, im: f64 },

    #[error("shrink step: perturbed point leaves the domain (largest usable step {suggested:e})")]
    StepTooLarge { suggested: f64 },

    #[error("index error: {0}")]
    Index(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
