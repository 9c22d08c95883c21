use alloc::string::String;

/// Everything that can go wrong inside the core crate.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("basis dimension must be at least 1")]
    EmptyBasis,
    #[error("non-finite coordinate in basis")]
    NonFinite,
    #[error("singular basis (condition number {cond:e})")]
    Singular { cond: f64 },
    #[error("ill-conditioned basis: condition number {cond:e} exceeds {limit:e}")]
    IllConditioned { cond: f64, limit: f64 },
    #[error("{name} out of domain: {reason}")]
    Domain { name: &'static str, reason: String },
    #[error("enumeration budget of {budget} points exceeded")]
    Budget { budget: u64 },
    #[error("bisection bracket failure: {0}")]
    Bracket(String),
    #[error("parameter outside supported regime: {0}")]
    Regime(String),
    #[error("amplification did not converge after {steps} operations (p = {p}, q = {q})")]
    NoConvergence { p: f64, q: f64, steps: usize },
}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn domain(name: &'static str, reason: impl Into<String>) -> Error {
    Error::Domain { name, reason: reason.into() }
}

/// Rejects anything that is not a finite, strictly positive number.
pub(crate) fn positive(name: &'static str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(domain(name, alloc::format!("must be a positive finite number, got {v}")))
    }
}

/// Open unit interval (0, 1).
pub(crate) fn unit_open(name: &'static str, v: f64) -> Result<()> {
    if v > 0.0 && v < 1.0 {
        Ok(())
    } else {
        Err(domain(name, alloc::format!("must lie in (0, 1), got {v}")))
    }
}
