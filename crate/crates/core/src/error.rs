use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("t = {t} is outside the path domain [{lo}, {hi}]")]
    Domain { t: f64, lo: f64, hi: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid return path: {0}")]
    InvalidPath(String),

    #[error("capital became nonpositive ({capital}) at t = {t}")]
    DegenerateCapital { t: f64, capital: f64 },

    #[error("intermediate investments are not supported here; use general_irr on the generated cash flows")]
    UnsupportedSchedule,

    #[error("cash flows do not change sign, no IRR exists")]
    NoRoot,

    #[error("event times cannot be placed on a common grid: {0}")]
    Discretization(String),

    #[error("root finder did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("discount rate must be positive, got {0}")]
    InvalidDiscount(f64),

    #[error("leverage must be >= -1, got {0}")]
    InvalidLeverage(f64),

    #[error("unleveraged NPV is zero (<r> = d); leverage ratio is indeterminate")]
    IndeterminateRatio,

    #[error("leveraged terminal value is nonpositive at tau = {tau} (log argument {argument})")]
    WipedOutEquity { tau: f64, argument: f64 },

    #[error("{what}: {a} and {b} disagree beyond tolerance")]
    Inconsistent { what: &'static str, a: f64, b: f64 },
}
