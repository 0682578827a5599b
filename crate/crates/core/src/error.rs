use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid space: {0}")]
    InvalidSpace(String),

    #[error("point does not belong to this space: {0}")]
    PointMismatch(String),

    #[error("ambiguous direction: {0}")]
    AmbiguousDirection(String),

    #[error("nonsmooth point of E: {0}")]
    Nonsmooth(String),

    #[error("operation not supported for {variant}: {op}")]
    Unsupported { variant: &'static str, op: &'static str },

    #[error("ambiguous minimal segment between breakpoints {index} and {next}; supply a witness")]
    AmbiguousSegment { index: usize, next: usize },

    #[error("invalid curve: {0}")]
    InvalidCurve(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("walk enumeration exceeded the cap of {cap} walks")]
    EnumerationCap { cap: usize },

    #[error("systole undefined: graph has no cycles")]
    SystoleUndefined,

    #[error("empty set passed to {0}")]
    EmptySet(&'static str),

    #[error("relation does not cover both samples: {0}")]
    NonCovering(String),

    #[error("exact bijection search limited to nets of at most {max} points (got {got}); use the greedy method")]
    NetTooLarge { max: usize, got: usize },

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
