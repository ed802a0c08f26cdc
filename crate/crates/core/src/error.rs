use thiserror::Error;

/// Errors raised by the library. Resample conditions are not errors and are
/// reported through the return types of the pipelines instead.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("cannot parse number `{0}`")]
    Parse(String),
    #[error("denominator is zero")]
    ZeroScale,
    #[error("invalid backend configuration: {0}")]
    Config(String),
    #[error("malformed element: {0}")]
    MalformedElement(String),
    #[error("baby-step reduction exceeded its budget of {budget} steps")]
    StepBudget { budget: usize },
    #[error("precision budget: {0}")]
    Precision(String),
    #[error("backend certification failed: {0}")]
    Certification(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("transform needs {cells} cells, cap is {cap}")]
    MemoryCap { cells: u128, cap: u128 },
    #[error("no success after {trials} trials")]
    TrialsExhausted { trials: u64 },
    #[error("regulator estimate too coarse: {0}")]
    EstimateTooCoarse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
