use thiserror::Error;

/// Errors surfaced by the decomposition toolkit.
///
/// Variants are grouped so the CLI can map them onto exit codes:
/// input problems, resource caps, and numeric failures.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("bitstring has length {got}, instance has {expected} variables")]
    LengthMismatch { expected: usize, got: usize },

    #[error("removing the given vertices leaves the graph connected")]
    NotACut,

    #[error("graph has no vertex cut (it is complete or too small)")]
    NoCut,

    #[error("graph is disconnected")]
    Disconnected,

    #[error("resource limit exceeded: {what} is {got}, limit {limit}")]
    ResourceLimit {
        what: &'static str,
        got: usize,
        limit: usize,
    },

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("solution lifting requires exact subproblem witnesses")]
    UnsupportedLift,

    #[error("analytic expectation supports only p = 1 (got p = {0})")]
    UnsupportedDepth(usize),

    #[error("random graph generation failed after {0} attempts")]
    Generation(usize),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// True for errors caused by a size cap rather than bad input.
    pub fn is_resource(&self) -> bool {
        matches!(self, Error::ResourceLimit { .. })
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidInput(msg.into()))
}
