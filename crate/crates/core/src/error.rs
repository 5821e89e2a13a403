use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("{what} did not converge within {iterations} iterations")]
    NonConvergence { what: &'static str, iterations: usize },

    #[error("quadrature tolerance not met: estimate {estimate}, error {error} > target {target}")]
    ToleranceNotMet { estimate: f64, error: f64, target: f64 },

    #[error("integrand returned non-finite value {value} at {at}")]
    NonFiniteIntegrand { at: f64, value: f64 },

    #[error("invalid sample: {0}")]
    InvalidSample(String),

    #[error("sample of size {n} is too small for subsets of size {m}")]
    InsufficientSample { n: usize, m: usize },

    #[error("brute-force enumeration is limited to n <= {limit}, got {n}")]
    SizeGuard { n: usize, limit: usize },

    #[error("degenerate data: {0}")]
    Degenerate(String),

    #[error("shift constant undefined: {0}")]
    UndefinedShift(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("replication failed at n = {n}, r = {replication}: {source}")]
    Replication {
        n: usize,
        replication: usize,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
