use thiserror::Error;

/// Which end of the extended real line a tail audit refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Negative,
    Positive,
}

impl std::fmt::Display for Side {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Side::Negative => write!(f, "-inf"),
            Side::Positive => write!(f, "+inf"),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("function is not continuous near x = {at} (oscillation {oscillation:e} does not shrink)")]
    NotContinuous { at: f64, oscillation: f64 },
    #[error("no real limit at {side} (deviation {deviation:e})")]
    NoLimitAtInfinity { side: Side, deviation: f64 },
    #[error("refinement budget exceeded in {0}")]
    BudgetExceeded(&'static str),
    #[error("empty interval: lower endpoint {lo} exceeds upper endpoint {hi}")]
    IntervalEmpty { lo: f64, hi: f64 },
    #[error("malformed bounded-variation pieces: {0}")]
    MalformedPieces(String),
    #[error("function is not monotone")]
    NonMonotone,
    #[error("no point satisfies the mean value identity (residual {0:e})")]
    ResidualTooLarge(f64),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("unknown fixture `{0}`")]
    UnknownFixture(String),
    #[error("evaluation produced a non-finite value at x = {0}")]
    Eval(f64),
}

pub type Result<T> = std::result::Result<T, Error>;
