use thiserror::Error;

#[derive(Debug, Error)]
pub enum DualityError {
    #[error(transparent)]
    Core(#[from] filtstab_core::CoreError),

    #[error(transparent)]
    Simulate(#[from] filtstab_simulate::SimError),

    /// A supplied measure fails a stationarity or positivity precondition.
    #[error("invalid measure: {0}")]
    Measure(String),

    /// Requested statistical resolution cannot be reached with the trial
    /// budget; the message carries an estimate of the required count.
    #[error("insufficient trials: {0}")]
    InsufficientTrials(String),

    /// A ratio estimator whose denominator is statistically indistinguishable
    /// from zero; no verdict can be attached.
    #[error("unstable estimator: {0}")]
    Unstable(String),

    /// No positive decay constant is available and the caller did not ask
    /// for the pathwise-weighted alternative.
    #[error("no positive decay constant: {0}")]
    NoDecayConstant(String),

    #[error("invalid argument: {0}")]
    Argument(String),
}

pub type Result<T> = std::result::Result<T, DualityError>;
