use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Model or run parameters that cannot describe a valid computation.
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    /// Pair correlators that cannot come from a physical two-spin state.
    #[error("inconsistent correlators: {0}")]
    CorrelatorConsistency(String),

    /// A density matrix that is not Hermitian, not unit-trace or not
    /// positive semidefinite.
    #[error("invalid density matrix: {0}")]
    DensityMatrix(String),

    /// Bad input to the finite-ring reference engine.
    #[error("oracle: {0}")]
    Oracle(String),
}

impl Error {
    pub(crate) fn params(msg: impl Into<String>) -> Self {
        Self::InvalidParams(msg.into())
    }
}
