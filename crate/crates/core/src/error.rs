use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("sample must contain at least {needed} observation(s), got {got}")]
    SampleTooSmall { needed: usize, got: usize },

    #[error("sample contains a non-finite value at position {index}")]
    NonFiniteObservation { index: usize },

    #[error("line {line}: cannot parse `{content}` as a number")]
    Parse { line: usize, content: String },

    #[error("estimator not applicable: {0}")]
    NotApplicable(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("no sign change found on the scan grid")]
    NoBracket,

    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("left fence never crosses the location parameter on the scan grid")]
    DegenerateThreshold,

    #[error("every replication failed for {estimator} at n = {n}")]
    AllReplicationsFailed { estimator: String, n: usize },
}

impl Error {
    /// Shorthand for [`Error::InvalidParameter`].
    pub fn param(name: &'static str, value: f64, reason: &'static str) -> Self {
        Error::InvalidParameter { name, value, reason }
    }
}
