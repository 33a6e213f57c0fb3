//! Error type shared by every module of the crate.

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("unsupported dimension {0} (only 1 and 2 are supported here)")]
    UnsupportedDimension(usize),

    #[error("map is not a similitude: {0}")]
    NotSimilitude(String),

    #[error("digit {digit} outside alphabet 1..={alphabet}")]
    InvalidDigit { digit: usize, alphabet: usize },

    #[error("an IFS needs at least two maps, got {0}")]
    TooFewMaps(usize),

    #[error("map {index} has ratio {ratio}, expected a value in (0, 1)")]
    NonContractive { index: usize, ratio: f64 },

    #[error("invalid cost {value} for map {index}: costs must be positive and finite")]
    InvalidCost { index: usize, value: f64 },

    #[error("expected {expected} costs, got {found}")]
    CostCount { expected: usize, found: usize },

    #[error("invalid address: {0}")]
    InvalidAddress(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("cut set exceeds the cap of {cap} words at budget {budget}")]
    CutSetCap { cap: usize, budget: f64 },

    #[error("exponents are not integers: {0:?}")]
    NonIntegerExponents(Vec<f64>),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("transform sets differ: {0}")]
    SetMismatch(String),

    #[error("nesting violated between levels {lower} and {upper}")]
    NestingViolation { lower: usize, upper: usize },

    #[error("empty scene")]
    EmptyScene,

    #[error("spec file error: {0}")]
    SpecFile(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::SpecFile(e.to_string())
    }
}
