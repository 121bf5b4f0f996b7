use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid shape: {0}")]
    InvalidShape(String),

    #[error("dense conversion of {n_sites} sites exceeds the cap of {cap}")]
    Capacity { n_sites: usize, cap: usize },

    #[error("site count mismatch: {0} vs {1}")]
    ShapeMismatch(usize, usize),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("no overlap eigenvalue is at or above sigma = {sigma}")]
    EmptyBasis { sigma: f64 },

    #[error("SVD did not converge")]
    NoConvergence,

    #[error("orbital has zero norm after summation")]
    DegenerateOrbital,
}

pub type Result<T> = std::result::Result<T, Error>;
