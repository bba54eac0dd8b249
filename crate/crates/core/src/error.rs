use std::fmt;

use thiserror::Error;

/// Syntax error in a vector-field expression. `position` is a byte offset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub position: usize,
    pub message: String,
}

impl ParseError {
    pub(crate) fn new(position: usize, message: impl Into<String>) -> Self {
        Self {
            position,
            message: message.into(),
        }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at position {}", self.message, self.position)
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Error)]
pub enum Error {
    #[error("syntax error in component {component}: {source}")]
    Syntax {
        component: usize,
        #[source]
        source: ParseError,
    },
    #[error("component {component} references x{var} but the system has dimension {dim}")]
    Arity {
        component: usize,
        var: usize,
        dim: usize,
    },
    #[error("unknown system '{0}'")]
    UnknownSystem(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("counter-example coincides with the set center; the update direction is undefined")]
    DegenerateCounterExample,
    #[error("cannot sample from an empty set")]
    EmptySet,
    #[error("rejection sampling gave up after {0} attempts")]
    SamplingBudget(usize),
    #[error("direction net does not cover the unit sphere (uncovered direction {witness:?})")]
    NetNotCovering { witness: Vec<f64> },
    #[error("epsilon bound is not checkable without both r and delta")]
    NotCheckable,
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
