use thiserror::Error;

/// Errors produced anywhere in the forecasting pipeline.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("empty series")]
    EmptySeries,

    #[error("non-finite value at index {index}")]
    NonFinite { index: usize },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("box-cox domain violation at index {index} (value {value}, lambda {lambda})")]
    BoxCoxDomain { index: usize, value: f64, lambda: f64 },

    #[error("inverse box-cox domain violation at index {index} (value {value}, lambda {lambda})")]
    InverseBoxCoxDomain { index: usize, value: f64, lambda: f64 },

    #[error("series too short: need at least {required} observations, got {actual}")]
    TooShort { required: usize, actual: usize },

    #[error("empty reference set")]
    EmptyReferenceSet,

    #[error("shape mismatch: {what} is {actual} but the reference set was built for {expected}")]
    ShapeMismatch {
        what: &'static str,
        expected: usize,
        actual: usize,
    },

    #[error("zero scaling denominator (in-sample seasonal differences are all zero)")]
    ZeroDenominator,

    #[error("{0}")]
    Aggregation(String),

    #[error("corpus error at line {line}: {reason}")]
    Corpus { line: u64, reason: String },

    #[error("duplicate observation for series `{id}` index {index} at line {line}")]
    DuplicateIndex { id: String, index: u64, line: u64 },

    #[error("unknown frequency label `{0}`")]
    UnknownFrequency(String),

    #[error("unsupported reference-set version {found} (expected {expected})")]
    Version { found: u32, expected: u32 },

    #[error("reference-set checksum mismatch (file corrupted or truncated)")]
    Checksum,

    #[error("reference-set payload malformed: {0}")]
    Malformed(String),

    #[error("config mismatch: reference set was built with a different preprocessing config")]
    ConfigMismatch,

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
