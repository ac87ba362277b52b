use thiserror::Error;

/// Errors raised while validating or operating on chain-level objects.
///
/// Construction is strict: invalid inputs are rejected, never repaired.
#[derive(Debug, Error)]
pub enum CoreError {
    #[error("invalid dimension: {0}")]
    Dimension(String),

    #[error("invalid generator: {0}")]
    Generator(String),

    /// The positive-rate digraph is not strongly connected. The pair names
    /// two states with no directed path from `from` to `to`.
    #[error("reducible generator: state {from} cannot reach state {to}")]
    Reducible { from: usize, to: usize },

    #[error("invalid probability vector: {0}")]
    Probability(String),

    #[error("invalid state function: {0}")]
    Function(String),

    #[error("invalid observation model: {0}")]
    Observation(String),

    #[error("invalid model file: {0}")]
    ModelFile(String),

    /// A numerical contract was violated (residual too large, solve failed).
    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("model JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, CoreError>;
