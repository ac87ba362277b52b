use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config: {0}")]
    Config(String),
    #[error("{0}")]
    Check(String),
    #[error("rate fit: {0}")]
    RateFit(String),
    #[error("unknown preset {0:?}; available: example1, counterexample, example4")]
    UnknownPreset(String),
    #[error(transparent)]
    Core(#[from] filtstab_core::CoreError),
    #[error(transparent)]
    Simulate(#[from] filtstab_simulate::SimError),
    #[error(transparent)]
    Duality(#[from] filtstab_duality::DualityError),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, CliError>;
