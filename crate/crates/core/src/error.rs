use thiserror::Error;

/// Errors produced by the numerical routines in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// An improper integral diverges (or could not be shown to converge).
    /// `lower_bound` is the mass accumulated before giving up.
    #[error("integral diverges: accumulated mass exceeds {lower_bound}")]
    Divergent { lower_bound: f64 },

    /// A computed quantity violates an invariant it must satisfy
    /// (probability outside [0,1], non-monotone tail, violated majorant).
    #[error("numerical integrity error: {0}")]
    Integrity(String),

    /// The requested computation exceeds the configured budget.
    /// `max_reachable` is the largest argument that fits in the budget.
    #[error("budget exceeded: {what}; largest reachable value is {max_reachable}")]
    Budget { what: String, max_reachable: f64 },

    /// The operation needs symbolic information the rate function does not carry.
    #[error("unsupported family: {0}")]
    UnsupportedFamily(String),

    /// A stated precondition of the operation does not hold.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// A configuration document could not be parsed or validated.
    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
