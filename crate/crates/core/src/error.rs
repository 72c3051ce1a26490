use thiserror::Error;

/// Failures reported by the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("series did not converge after {terms} terms ({what})")]
    Convergence { what: &'static str, terms: usize },

    #[error("no sign change on [{a}, {b}] (f(a) = {fa:e}, f(b) = {fb:e})")]
    NoSignChange { a: f64, b: f64, fa: f64, fb: f64 },

    #[error("root finder exhausted {0} iterations")]
    MaxIterations(usize),

    #[error("solution lost positivity or step size underflowed at t = {t}")]
    BlowUp { t: f64 },

    #[error("t = {t} outside the solution range [{lo}, {hi}]")]
    OutOfRange { t: f64, lo: f64, hi: f64 },

    #[error(
        "matching condition w'(1) = w(1)/2 has no positive solution for n = {n}: \
         w'(1) - w(1)/2 stays positive"
    )]
    NoPositiveSolution { n: u32 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
