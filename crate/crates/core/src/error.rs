use thiserror::Error;

/// Errors raised by the approximation pipeline.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    #[error("element index {index} out of range for truncation of size {total}")]
    IndexOutOfRange { index: usize, total: usize },

    #[error("point {point:?} lies outside the bounding box")]
    PointOutsideBox { point: Vec<f64> },

    #[error("descriptor does not match dictionary: {0}")]
    DescriptorMismatch(String),

    #[error("coefficient vector has length {got}, expected {expected}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("growth policy {policy} cannot be applied to this dictionary: {reason}")]
    IncompatiblePolicy { policy: &'static str, reason: String },

    #[error("no reachable truncation with total {direction} {target}")]
    NoReachable { target: usize, direction: &'static str },

    #[error("mask is degenerate: no interior points found after grid refinement")]
    DegenerateMask,

    #[error("non-finite value {value} at {point:?}")]
    NonFinite { point: Vec<f64>, value: String },

    #[error("system is underdetermined: {rows} rows for {cols} columns")]
    Underdetermined { rows: usize, cols: usize },

    #[error("singular value decomposition failed: {0}")]
    Svd(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
