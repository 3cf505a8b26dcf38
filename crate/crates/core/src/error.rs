//! Error type shared by all modules.

use alloc::vec::Vec;
use core::fmt;

/// Crate-wide result alias.
pub type Result<T> = core::result::Result<T, Error>;

/// Errors raised during construction, sampling, and estimation.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A matrix or vector argument contains NaN or an infinity.
    NonFiniteInput,
    /// The objective returned a non-finite value at the given point.
    NonFiniteValue { point: Vec<f64> },
    /// Operand shapes are incompatible.
    ShapeMismatch {
        expected: (usize, usize),
        got: (usize, usize),
    },
    /// A square matrix was required.
    NotSquare { rows: usize, cols: usize },
    /// A needed function value is absent from the evaluation cache.
    MissingCacheEntry { point: Vec<f64> },
    /// The matrix is not partial diagonal with full column rank.
    NotPartialDiagonal,
    /// Scheme parameters violate a precondition of the chosen scheme.
    InvalidScheme(&'static str),
    /// A direction matrix is empty, non-finite, or has null rank.
    InvalidDirections(&'static str),
    /// Requested tensor order exceeds the configured maximum.
    OrderTooHigh { requested: usize, max: usize },
    /// The requested configuration is not supported by this estimator.
    Unsupported(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::NonFiniteInput => write!(f, "input contains a non-finite value"),
            Error::NonFiniteValue { point } => {
                write!(f, "objective returned a non-finite value at {point:?}")
            }
            Error::ShapeMismatch { expected, got } => write!(
                f,
                "shape mismatch: expected {}x{}, got {}x{}",
                expected.0, expected.1, got.0, got.1
            ),
            Error::NotSquare { rows, cols } => {
                write!(f, "square matrix required, got {rows}x{cols}")
            }
            Error::MissingCacheEntry { point } => {
                write!(f, "no cached function value at {point:?}")
            }
            Error::NotPartialDiagonal => write!(
                f,
                "matrix is not partial diagonal with full column rank"
            ),
            Error::InvalidScheme(msg) => write!(f, "invalid scheme: {msg}"),
            Error::InvalidDirections(msg) => write!(f, "invalid directions: {msg}"),
            Error::OrderTooHigh { requested, max } => {
                write!(f, "derivative order {requested} exceeds configured maximum {max}")
            }
            Error::Unsupported(msg) => write!(f, "unsupported configuration: {msg}"),
        }
    }
}

impl core::error::Error for Error {}
