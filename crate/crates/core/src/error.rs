use core::fmt;

use alloc::string::String;

/// Errors produced by graph construction, reductions and numerical routines.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Malformed input structure: bad lengths, out-of-range indices, self-loops.
    Structure(String),
    /// The graph is not connected; `unreachable` is one vertex not reached from vertex 0.
    Disconnected { unreachable: usize },
    /// An argument lies outside the domain of the operation.
    Domain(String),
    /// A precondition on the potential or degree was not met.
    Precondition(String),
    /// A series or iteration diverges for the given argument.
    Divergence(String),
    /// An iterative method failed to converge or a residual check failed.
    Numeric { what: &'static str, residual: f64 },
    /// Input exceeds the size supported by an exhaustive routine.
    TooLarge { what: &'static str, limit: usize, got: usize },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Structure(msg) => write!(f, "invalid structure: {msg}"),
            Error::Disconnected { unreachable } => {
                write!(f, "graph is not connected (vertex {unreachable} unreachable from 0)")
            }
            Error::Domain(msg) => write!(f, "domain error: {msg}"),
            Error::Precondition(msg) => write!(f, "precondition violated: {msg}"),
            Error::Divergence(msg) => write!(f, "divergent series: {msg}"),
            Error::Numeric { what, residual } => {
                write!(f, "numerical failure in {what} (residual {residual:e})")
            }
            Error::TooLarge { what, limit, got } => {
                write!(f, "{what}: size {got} exceeds limit {limit}")
            }
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
