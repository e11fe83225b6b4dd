use thiserror::Error;

use crate::dynamics::Trajectory;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("line {line}: undeclared species `{name}`")]
    UndeclaredSpecies { line: usize, name: String },

    #[error("no vertices")]
    NoVertices,

    #[error("vertex `{0}` has outgoing edges but no kinetic-order complex")]
    MissingKinetic(String),

    #[error("self-loop at vertex `{0}`")]
    SelfLoop(String),

    #[error("duplicate edge {0} -> {1}")]
    DuplicateEdge(String, String),

    #[error("invalid network: {0}")]
    InvalidNetwork(String),

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("{what} must be strictly positive")]
    NonPositive { what: &'static str },

    #[error("dimension {found} exceeds the cap of {cap} for {what}")]
    DimensionCap {
        what: &'static str,
        found: usize,
        cap: usize,
    },

    #[error("cycle enumeration exceeded the cap of {0} cycles")]
    CycleCap(usize),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("step size underflow at t = {t}")]
    StepSizeUnderflow { t: f64, partial: Box<Trajectory> },

    #[error("internal consistency error: {0}")]
    Internal(String),
}

impl Error {
    /// True for errors that come from resource caps rather than bad input.
    pub fn is_resource(&self) -> bool {
        matches!(self, Error::DimensionCap { .. } | Error::CycleCap(_))
    }

    /// True for errors caused by the caller's input (file contents, dimensions).
    pub fn is_input(&self) -> bool {
        matches!(
            self,
            Error::Syntax { .. }
                | Error::UndeclaredSpecies { .. }
                | Error::NoVertices
                | Error::MissingKinetic(_)
                | Error::SelfLoop(_)
                | Error::DuplicateEdge(..)
                | Error::InvalidNetwork(_)
                | Error::DimensionMismatch { .. }
                | Error::NonPositive { .. }
        )
    }
}
