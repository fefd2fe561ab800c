//! Error type shared across the crate.

use alloc::string::String;
use core::fmt;

/// Errors reported by protocol, code, and linear-algebra operations.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Two bit strings that must have equal length do not.
    LengthMismatch { expected: usize, actual: usize },
    /// The database size is not compatible with the requested arrangement.
    IncompatibleArrangement { n: usize, wanted: &'static str },
    /// An index is outside the valid range (including padded database slots).
    IndexOutOfRange { index: usize, len: usize },
    /// An exhaustive enumeration would exceed the configured cap.
    EnumerationTooLarge { bits: usize, cap_bits: usize },
    /// Matrix or vector dimensions do not match.
    DimensionMismatch { expected: usize, actual: usize },
    /// A matrix that must be positive semidefinite has a clearly negative eigenvalue.
    NotPsd { eigenvalue: f64 },
    /// The given columns of a partial unitary are not pairwise orthonormal.
    ColumnsNotOrthonormal {
        col_a: usize,
        col_b: usize,
        deviation: f64,
    },
    /// A matrix that must be symmetric is not.
    NotSymmetric { deviation: f64 },
    /// A claimed projector is not symmetric idempotent.
    NotAProjector { deviation: f64 },
    /// The given operators do not form a POVM.
    NotAPovm(String),
    /// A decoder amplitude exceeds the smoothness envelope `c/(2m)`.
    PovmInvalid {
        position: usize,
        amplitude_sq: f64,
        cap: f64,
    },
    /// A selection set does not match the declared probe size.
    SelectionMismatch { expected: usize, actual: usize },
    /// A scalar parameter is outside its valid range.
    InvalidParameter(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::LengthMismatch { expected, actual } => {
                write!(f, "length mismatch: expected {expected}, got {actual}")
            }
            Error::IncompatibleArrangement { n, wanted } => {
                write!(
                    f,
                    "database size {n} is not compatible with a {wanted} arrangement"
                )
            }
            Error::IndexOutOfRange { index, len } => {
                write!(f, "index {index} out of range for length {len}")
            }
            Error::EnumerationTooLarge { bits, cap_bits } => {
                write!(
                    f,
                    "enumeration over 2^{bits} values exceeds the 2^{cap_bits} cap"
                )
            }
            Error::DimensionMismatch { expected, actual } => {
                write!(f, "dimension mismatch: expected {expected}, got {actual}")
            }
            Error::NotPsd { eigenvalue } => {
                write!(
                    f,
                    "matrix is not positive semidefinite (eigenvalue {eigenvalue:e})"
                )
            }
            Error::ColumnsNotOrthonormal {
                col_a,
                col_b,
                deviation,
            } => {
                write!(
                    f,
                    "columns {col_a} and {col_b} are not orthonormal (deviation {deviation:e})"
                )
            }
            Error::NotSymmetric { deviation } => {
                write!(f, "matrix is not symmetric (deviation {deviation:e})")
            }
            Error::NotAProjector { deviation } => {
                write!(f, "operator is not a projector (deviation {deviation:e})")
            }
            Error::NotAPovm(why) => write!(f, "not a POVM: {why}"),
            Error::PovmInvalid {
                position,
                amplitude_sq,
                cap,
            } => {
                write!(
                    f,
                    "amplitude^2 {amplitude_sq:e} at position {position} exceeds smoothness cap {cap:e}"
                )
            }
            Error::SelectionMismatch { expected, actual } => {
                write!(f, "selection set of size {actual}, expected {expected}")
            }
            Error::InvalidParameter(why) => write!(f, "invalid parameter: {why}"),
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
