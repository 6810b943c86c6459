// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("value out of domain: {0}")]
    Domain(String),

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("index {index} out of range [{low}, {high}]")]
    IndexOutOfRange {
        index: usize,
        low: usize,
        high: usize,
    },

    #[error("unsupported security parameter {0}")]
    UnsupportedSecurity(u32),

    #[error("malformed encoding: {0}")]
    Decode(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(
        "sample budget exceeded: {required} samples per round required, budget is {budget}; {suggestion}"
    )]
    Budget {
        required: u64,
        budget: u64,
        suggestion: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn decode(msg: impl Into<String>) -> Self {
        Error::Decode(msg.into())
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }
}
