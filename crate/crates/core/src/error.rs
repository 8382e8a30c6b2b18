use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("too few points: need at least {needed}, got {got}")]
    TooFewPoints { needed: usize, got: usize },

    #[error("times must be strictly increasing (violated at index {index})")]
    NotIncreasing { index: usize },

    #[error("sampling scheme is not monotone near t = {t}: psi' = {rate}")]
    NonMonotone { t: f64, rate: f64 },

    #[error("point {x} lies outside the interpolant domain [{lo}, {hi}]")]
    OutOfDomain { x: f64, lo: f64, hi: f64 },

    #[error("repeated knots at index {index}")]
    RepeatedKnots { index: usize },

    #[error(
        "interpolation system is singular or ill-conditioned (condition estimate {condition:e}) \
         near knot span [{span_lo}, {span_hi}]"
    )]
    IllConditioned {
        condition: f64,
        span_lo: f64,
        span_hi: f64,
    },

    #[error("sample-time sets differ: {0}")]
    SampleTimesDiffer(String),

    #[error("signal of length {len} is shorter than the window ({window})")]
    SignalTooShort { len: usize, window: usize },

    #[error("empty frequency band [{lo}, {hi}] Hz")]
    EmptyBand { lo: f64, hi: f64 },

    #[error("unknown scenario `{0}`")]
    UnknownScenario(String),

    #[error("parse error at row {row}: {message}")]
    Parse { row: usize, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
