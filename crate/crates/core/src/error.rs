use thiserror::Error;

use crate::closed_form::Method;
use crate::summary_stats::Scenario;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{lower} ({lower_value}) exceeds {upper} ({upper_value})")]
    OrderingViolation { lower: &'static str, lower_value: f64, upper: &'static str, upper_value: f64 },
    #[error("scenario {scenario} requires `{field}`")]
    MissingField { field: &'static str, scenario: Scenario },
    #[error("sample size {n} is too small, at least 2 observations are required")]
    SampleSizeTooSmall { n: usize },
    #[error("sample is empty")]
    EmptySample,
    #[error("`{field}` is not finite")]
    NonFiniteValue { field: &'static str },
    #[error("invalid distribution parameters: {0}")]
    InvalidParameters(String),
    #[error("{function} is undefined at {value}")]
    DomainError { function: &'static str, value: f64 },
    #[error("{method} does not support scenario {scenario}")]
    UnsupportedScenario { method: Method, scenario: Scenario },
    #[error("variance estimate is negative ({variance})")]
    NegativeVariance { variance: f64 },
    #[error("quantile denominator is not positive for n = {n}")]
    DegenerateRange { n: usize },
    #[error("log-scale prior needs a positive `{field}`, got {value}")]
    NonPositiveSupport { field: &'static str, value: f64 },
    #[error("summary statistics fall outside the support of the model: {0}")]
    IncompatibleSupport(String),
    #[error("no draw was within epsilon = {epsilon}")]
    NoAcceptedDraws { epsilon: f64 },
    #[error("summary vectors differ in length ({left} vs {right})")]
    LengthMismatch { left: usize, right: usize },
    #[error("accepted draws are tied across all {candidates} candidates; selection is uninformative")]
    DegenerateSelection { candidates: usize },
    #[error("sample standard deviation is zero; relative error is undefined")]
    ZeroTruth,
    #[error("configuration error: {0}")]
    Config(String),
}

impl Error {
    /// Stable identifier used in the `error_code` column of CLI outputs.
    pub fn code(&self) -> &'static str {
        match self {
            Error::OrderingViolation { .. } => "OrderingViolation",
            Error::MissingField { .. } => "MissingField",
            Error::SampleSizeTooSmall { .. } => "SampleSizeTooSmall",
            Error::EmptySample => "EmptySample",
            Error::NonFiniteValue { .. } => "NonFiniteValue",
            Error::InvalidParameters(_) => "InvalidParameters",
            Error::DomainError { .. } => "DomainError",
            Error::UnsupportedScenario { .. } => "UnsupportedScenario",
            Error::NegativeVariance { .. } => "NegativeVariance",
            Error::DegenerateRange { .. } => "DegenerateRange",
            Error::NonPositiveSupport { .. } => "NonPositiveSupport",
            Error::IncompatibleSupport(_) => "IncompatibleSupport",
            Error::NoAcceptedDraws { .. } => "NoAcceptedDraws",
            Error::LengthMismatch { .. } => "LengthMismatch",
            Error::DegenerateSelection { .. } => "DegenerateSelection",
            Error::ZeroTruth => "ZeroTruth",
            Error::Config(_) => "ConfigError",
        }
    }
}
