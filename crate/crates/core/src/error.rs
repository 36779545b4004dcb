use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument falls outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A configuration exceeds one of the simulation guardrails.
    #[error("guardrail: {0}")]
    Guardrail(String),

    /// The trace was produced by a sampling mode that does not carry the
    /// requested data (e.g. occupancy of a renewal-mode trace).
    #[error("unsupported for {mode} traces: {what}")]
    UnsupportedMode { mode: &'static str, what: &'static str },

    /// The requested time falls inside a part of the trace that was only
    /// recorded in aggregate.
    #[error("time {t} is not resolvable in this trace: {why}")]
    Unresolved { t: f64, why: &'static str },

    /// Two measure objects cannot be combined.
    #[error("mismatch: {0}")]
    Mismatch(String),
}

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
