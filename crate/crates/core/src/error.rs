use thiserror::Error;

/// Errors raised by the library layers (model, estimators, simulator, bounds).
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid arm parameters: {0}")]
    InvalidArm(String),

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("no samples")]
    NoSamples,

    #[error("insufficient samples: need {needed}, have {have}")]
    InsufficientSamples { needed: usize, have: usize },

    #[error("insufficient samples for grouping: {groups} groups, {have} samples")]
    InsufficientForGrouping { groups: usize, have: usize },

    #[error("episode cap exceeded: {cap} pulls at budget {budget}")]
    EpisodeCapExceeded { cap: u64, budget: f64 },

    #[error("stopping rule violated: S_(N-1) = {prior}, B = {budget}, S_N = {total}")]
    StoppingRule { prior: f64, budget: f64, total: f64 },

    #[error("budget index {budget_index}, trial {trial}: {source}")]
    Trial {
        budget_index: usize,
        trial: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("budget grids differ")]
    BudgetMismatch,

    #[error("optimal arm has no bound term (arm {0})")]
    OptimalArm(usize),

    #[error("variance-estimation term undefined: arm {0} has zero cost variance")]
    ZeroCostVariance(usize),

    #[error("closed form valid only for Gaussian (arm {0})")]
    NotGaussian(usize),

    #[error("log fit needs at least 3 distinct budget points, got {0}")]
    TooFewPoints(usize),
}

pub type Result<T> = std::result::Result<T, Error>;
