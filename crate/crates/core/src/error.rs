use thiserror::Error;

use crate::rational::{format_rational, Q};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("label {label} is not valid for {group}")]
    InvalidLabel { label: String, group: String },

    #[error("invalid group: {0}")]
    InvalidGroup(String),

    #[error("symmetric power degree {requested} exceeds the configured bound {bound}")]
    DegreeBound { requested: usize, bound: usize },

    #[error("invalid tail model: {0}")]
    InvalidTail(String),

    #[error("pairing <theta, h> = {} is not zero", format_rational(.0))]
    NonZeroPairing(Q),

    #[error("window does not contain the negative label {0}")]
    WindowMissingNegative(String),

    #[error("invalid window: {0}")]
    InvalidWindow(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("invalid module: {0}")]
    InvalidModule(String),

    #[error("matrix for {0} is not invertible")]
    NotInvertible(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("enumeration cap of {cap} exceeded")]
    CapExceeded { cap: usize },

    #[error("invariant generators incomplete: {0}")]
    BoundTooSmall(String),

    #[error("{0}")]
    Parse(String),

    /// An internal identity failed to hold; always a bug, never bad input.
    #[error("internal assertion failed: {0}")]
    Internal(String),
}

impl Error {
    /// True for failures caused by the input rather than by the library.
    pub fn is_input_error(&self) -> bool {
        !matches!(self, Error::Internal(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
