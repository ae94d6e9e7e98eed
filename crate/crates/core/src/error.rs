//! Error types shared across the crate.

use std::fmt;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// The structure graph has more connected components than the requested
    /// number of clusters, so no valid partition exists.
    #[error("infeasible: graph has {components} connected components but k = {k}; need k >= {components}")]
    Infeasible { components: usize, k: usize },

    /// A documented size guard was hit; the operation refuses rather than
    /// running with super-linear cost.
    #[error("{operation} refused: p = {p} exceeds the limit of {limit}")]
    GuardExceeded {
        operation: &'static str,
        p: usize,
        limit: usize,
    },

    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    #[error("non-finite value at {0}")]
    NonFinite(String),

    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Structured parse failure pointing at a byte offset (binary formats) or a
/// line number (text formats).
#[derive(Debug, thiserror::Error)]
pub struct ParseError {
    pub what: &'static str,
    pub at: ParseLocation,
    pub message: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParseLocation {
    ByteOffset(u64),
    Line(usize),
    Whole,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.at {
            ParseLocation::ByteOffset(o) => {
                write!(f, "{} parse error at byte {}: {}", self.what, o, self.message)
            }
            ParseLocation::Line(l) => {
                write!(f, "{} parse error at line {}: {}", self.what, l, self.message)
            }
            ParseLocation::Whole => write!(f, "{} parse error: {}", self.what, self.message),
        }
    }
}

impl ParseError {
    pub fn at_byte(what: &'static str, offset: u64, message: impl Into<String>) -> Self {
        ParseError {
            what,
            at: ParseLocation::ByteOffset(offset),
            message: message.into(),
        }
    }

    pub fn at_line(what: &'static str, line: usize, message: impl Into<String>) -> Self {
        ParseError {
            what,
            at: ParseLocation::Line(line),
            message: message.into(),
        }
    }

    pub fn whole(what: &'static str, message: impl Into<String>) -> Self {
        ParseError {
            what,
            at: ParseLocation::Whole,
            message: message.into(),
        }
    }
}
