use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("{function} has a pole at {at}")]
    Pole { function: &'static str, at: f64 },

    #[error("{function}: argument out of domain: {detail}")]
    Domain {
        function: &'static str,
        detail: String,
    },

    #[error("{function} did not converge after {terms} terms")]
    NonConvergence { function: &'static str, terms: usize },

    #[error("Bernoulli table requested up to n = {0}, limit is 60")]
    BernoulliOverflow(usize),

    #[error("missing endpoint derivative: {0}")]
    MissingDerivative(&'static str),

    #[error("grid too short: n = {n}, need n > {needed}")]
    GridTooShort { n: usize, needed: usize },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("degenerate denominator Γ(α) + c0·h^α = {0:e}")]
    DegenerateDenominator(f64),

    #[error("invalid sweep: {0}")]
    InvalidSweep(String),

    #[error("at h = {h}, scheme {scheme}: {source}")]
    Sweep {
        h: f64,
        scheme: String,
        #[source]
        source: Box<Error>,
    },

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn domain(function: &'static str, detail: impl Into<String>) -> Self {
        Error::Domain {
            function,
            detail: detail.into(),
        }
    }
}
