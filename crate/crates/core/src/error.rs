use thiserror::Error;

use crate::hilbert::SpinKind;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("chain length {0} is too short (need at least 2 sites)")]
    ChainTooShort(usize),

    #[error("chain length {length} with spin {spin} gives a Hilbert space that is too large")]
    ChainTooLong { length: usize, spin: SpinKind },

    #[error("unsupported spin kind `{0}` (expected `half` or `one`)")]
    UnsupportedSpin(String),

    #[error("coupling must be finite, got {0}")]
    InvalidCoupling(f64),

    #[error("invalid site pair ({i}, {j}) for a chain of {length} sites")]
    InvalidSitePair { i: usize, j: usize, length: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("level index {index} out of range ({count} levels)")]
    LevelOutOfRange { index: usize, count: usize },

    #[error("eigensolver failed to converge in sector m = {magnetization}")]
    EigensolverFailed { magnetization: f64 },

    #[error("operator couples sector m = {from} to sector m = {to}")]
    SectorLeak { from: f64, to: f64 },

    #[error("{measure} is not defined for spin-{spin} chains")]
    IncompatibleMeasure { measure: &'static str, spin: SpinKind },

    #[error("temperature must be positive, got {0}")]
    NonPositiveTemperature(f64),

    #[error("temperature grid is empty")]
    EmptyGrid,

    #[error("temperature grid must be strictly increasing and positive")]
    InvalidGrid,

    #[error("tolerance must be positive, got {0}")]
    InvalidTolerance(f64),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("no entanglement at any temperature for bond ({i}, {j})")]
    NoEntanglement { i: usize, j: usize },

    #[error("no upper bracket: bond ({i}, {j}) is still entangled at T = {temperature}")]
    NoUpperBracket { i: usize, j: usize, temperature: f64 },
}

impl Error {
    /// True when the error comes from bad caller input rather than a failed
    /// computation.
    pub fn is_invalid_input(&self) -> bool {
        use Error::*;
        matches!(
            self,
            ChainTooShort(_)
                | ChainTooLong { .. }
                | UnsupportedSpin(_)
                | InvalidCoupling(_)
                | InvalidSitePair { .. }
                | LevelOutOfRange { .. }
                | IncompatibleMeasure { .. }
                | NonPositiveTemperature(_)
                | EmptyGrid
                | InvalidGrid
                | InvalidTolerance(_)
                | InvalidState(_)
                | DimensionMismatch { .. }
        )
    }
}
