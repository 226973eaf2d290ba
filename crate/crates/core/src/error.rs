// Copyright 2026 DACQO Contributors
// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

/// Errors raised across the library.
#[derive(Debug, Error)]
pub enum Error {
    /// An input violated a precondition.
    #[error("invalid argument: {0}")]
    Argument(String),

    /// A size cap (dense matrix dimension, enumeration bound) was exceeded.
    #[error("capability exceeded: {0}")]
    Capability(String),

    /// The closed-form CD coefficient has a vanishing denominator.
    #[error("singular counterdiabatic coefficient: {0}")]
    Singularity(String),

    /// Circuit synthesis could not satisfy its targets.
    #[error("synthesis failed: {0}")]
    Synthesis(String),

    /// A numerical routine failed to converge or produced non-finite output.
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// Experiment configuration could not be read or validated.
    #[error("configuration error: {0}")]
    Config(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn arg(msg: impl Into<String>) -> Self {
        Error::Argument(msg.into())
    }

    pub(crate) fn cap(msg: impl Into<String>) -> Self {
        Error::Capability(msg.into())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Config(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(std::io::Error::other(e.to_string()))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
