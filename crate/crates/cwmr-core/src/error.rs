use alloc::string::String;
use core::fmt;

/// Errors surfaced by grid operations, transform construction, and the codec.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// An operation that halves dimensions received an odd-sized grid.
    OddDimension { n: usize },
    /// Boundary extension requested more ghost cells than the grid has rows.
    HaloExceedsGrid { halo: usize, n: usize },
    /// Grid side is not divisible by 2^levels.
    NotDivisible { n: usize, levels: u32 },
    /// The coarsest level of a transform would be smaller than allowed.
    CoarsestTooSmall { coarsest: usize, min: usize },
    /// Two grids that must have equal dimensions do not.
    SizeMismatch { left: usize, right: usize },
    /// A scalar or enum parameter is outside its allowed range.
    BadParameter(&'static str),
    /// Serialized data failed validation.
    Format(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::OddDimension { n } => write!(f, "grid side {n} is odd; expected even"),
            Error::HaloExceedsGrid { halo, n } => {
                write!(f, "halo {halo} exceeds grid side {n}")
            }
            Error::NotDivisible { n, levels } => {
                write!(f, "grid side {n} is not divisible by 2^{levels}")
            }
            Error::CoarsestTooSmall { coarsest, min } => {
                write!(f, "coarsest grid side {coarsest} is below the minimum {min}")
            }
            Error::SizeMismatch { left, right } => {
                write!(f, "grid sides differ: {left} vs {right}")
            }
            Error::BadParameter(what) => write!(f, "invalid parameter: {what}"),
            Error::Format(msg) => write!(f, "format error: {msg}"),
        }
    }
}

impl core::error::Error for Error {}
