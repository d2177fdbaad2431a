use thiserror::Error;

use crate::arcs::DiscreteArc;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A numeric parameter is outside its admissible domain.
    #[error("parameter `{name}` out of domain: {reason}")]
    ParameterDomain { name: &'static str, reason: String },

    /// Incompatible or inadmissible configuration (matrix/schedule pairing, constants).
    #[error("configuration error: {0}")]
    Config(String),

    /// An operation-level precondition does not hold (bound validity floors, isolation, ...).
    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("input too short: need {needed} samples, got {got}")]
    InputLength { needed: usize, got: usize },

    #[error("lower level {h} exceeds upper level {h_prime}")]
    LevelOrder { h: f64, h_prime: f64 },

    #[error("{0} is not supported for this summation matrix")]
    Unsupported(&'static str),

    /// Every grid point cleared the detection level: the arc has no endpoints.
    #[error("degenerate localization: superlevel set covers the whole circle (J = {})", .arc.grid)]
    DegenerateLocalization { arc: DiscreteArc },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed input: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::ParameterDomain {
            name,
            reason: reason.into(),
        }
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::ParameterDomain { .. }
            | Error::Config(_)
            | Error::Unsupported(_)
            | Error::Io { .. }
            | Error::Parse(_) => 2,
            Error::Precondition(_)
            | Error::InputLength { .. }
            | Error::LevelOrder { .. }
            | Error::DegenerateLocalization { .. } => 3,
        }
    }
}
