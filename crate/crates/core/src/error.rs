use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("non-finite value for quantity of mass dimension {dim}")]
    NonFinite { dim: i32 },

    #[error("dimension mismatch: expected mass dimension {expected}, got {actual}")]
    Dimension { expected: i32, actual: i32 },

    #[error("power {num}/{den} of a quantity with mass dimension {dim} is not an integer dimension")]
    FractionalDimension { dim: i32, num: i32, den: i32 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("characteristic volume undefined when vacuum does not decay ({0})")]
    NoDecay(String),

    #[error("integration failed after {steps} steps at a = {last_a:e} (t = {last_t:e} GeV^-1): {reason}")]
    IntegrationFailure {
        steps: usize,
        last_a: f64,
        last_t: f64,
        reason: String,
    },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("resource limit: {requested} kicks requested, cap is {cap}")]
    ResourceLimit { requested: u128, cap: u128 },

    #[error("internal consistency error: {0}")]
    InternalConsistency(String),
}
