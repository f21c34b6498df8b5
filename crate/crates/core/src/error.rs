use alloc::string::String;
use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

/// Errors raised across the crate.
///
/// Variants are grouped by how a caller is expected to react, which is also
/// how the command-line front end maps them onto exit codes.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A parameter violates its type invariant (non-positive scale, etc).
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },
    /// An argument lies outside the operation's domain.
    Domain(String),
    /// The requested quantity is singular at this point.
    Singularity(String),
    /// A point-process model is not valid over the requested horizon.
    ModelValidity(String),
    /// A precondition on the input (not a single argument) does not hold.
    Precondition(String),
    /// Event lists that overlap, are unsorted or fall outside a mission.
    EventValidation(String),
    /// Too few events for the requested fit.
    InsufficientData {
        model: &'static str,
        required: usize,
        found: usize,
    },
    /// A Monte Carlo estimate saw no failures at all.
    InsufficientEvents { trajectories: usize },
    /// An iterative solver stopped without meeting its tolerance.
    Convergence {
        reason: String,
        iterations: usize,
        width: f64,
    },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidParameter {
                name,
                value,
                reason,
            } => write!(f, "invalid parameter `{name}` = {value}: {reason}"),
            Error::Domain(msg) => write!(f, "domain error: {msg}"),
            Error::Singularity(msg) => write!(f, "singularity: {msg}"),
            Error::ModelValidity(msg) => write!(f, "invalid model: {msg}"),
            Error::Precondition(msg) => write!(f, "precondition failed: {msg}"),
            Error::EventValidation(msg) => write!(f, "invalid events: {msg}"),
            Error::InsufficientData {
                model,
                required,
                found,
            } => write!(
                f,
                "insufficient data for {model}: need at least {required} failures, found {found}"
            ),
            Error::InsufficientEvents { trajectories } => write!(
                f,
                "no failures observed across {trajectories} trajectories"
            ),
            Error::Convergence {
                reason,
                iterations,
                width,
            } => write!(
                f,
                "no convergence after {iterations} iterations (width {width:e}): {reason}"
            ),
        }
    }
}

impl core::error::Error for Error {}

pub(crate) fn check_positive(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            reason: "must be finite and strictly positive",
        })
    }
}

pub(crate) fn check_finite(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            reason: "must be finite",
        })
    }
}
