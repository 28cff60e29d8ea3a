use std::fmt;

use thiserror::Error;

/// Location inside a text input, 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Span {
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}", self.line, self.column)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("{span}: {message}")]
pub struct ParseError {
    pub span: Span,
    pub message: String,
}

impl ParseError {
    pub fn new(line: usize, column: usize, message: impl Into<String>) -> Self {
        Self {
            span: Span { line, column },
            message: message.into(),
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// The requested exhaustive search is larger than the configured budget.
    #[error("enumeration budget exceeded: {needed} candidates > budget {budget}")]
    Budget { needed: u128, budget: u128 },

    /// No set of `p` points with pairwise distance at least `delta` fits on the search grid.
    #[error(
        "no {p} sensors with pairwise separation {delta} fit in the rectangle \
         (largest separated set found: {packed} points)"
    )]
    Separation { p: usize, delta: f64, packed: usize },

    /// No point of the rectangle hears every other point within the range threshold.
    #[error("range threshold {threshold} admits no sensor position; minimal threshold is {min_threshold}")]
    EmptyCoverage { threshold: f64, min_threshold: f64 },

    #[error("parse error at {0}")]
    Parse(#[from] ParseError),

    #[error("graph is disconnected: no path between vertex {from} and vertex {to}")]
    Disconnected { from: usize, to: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn param<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Parameter(msg.into()))
}
