use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("non-finite value at index {index}")]
    NonFinite { index: usize },

    #[error("negative spectral mass at index {index}: {value}")]
    NegativeSpectralMass { index: usize, value: f64 },

    #[error("grid size {0} is not a power of two")]
    NotPowerOfTwo(usize),

    #[error("aliasing: harmonic {harmonic} is not below the Nyquist index of grid size {n}")]
    Aliasing { harmonic: usize, n: usize },

    #[error("tail unknown: {0}")]
    TailUnknown(String),

    #[error("input is not positive semidefinite: cosine coefficient {index} = {value}")]
    NotPositiveSemidefinite { index: usize, value: f64 },

    #[error("invalid covariogram: {0}")]
    InvalidCovariogram(String),

    #[error("degenerate observation: {0}")]
    Degenerate(String),

    #[error("empty ensemble")]
    EmptyEnsemble,

    #[error("malformed input: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code for the command-line tools.
    ///
    /// 2 usage, 3 aliasing, 4 not a valid covariance, 5 degenerate data.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Aliasing { .. } => 3,
            Error::NegativeSpectralMass { .. }
            | Error::NotPositiveSemidefinite { .. }
            | Error::InvalidCovariogram(_) => 4,
            Error::Degenerate(_) | Error::EmptyEnsemble => 5,
            _ => 2,
        }
    }
}
