// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

pub type Result<T, E = ChebError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum ChebError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("x = {x} is outside the sieved range [0, {x_max}]")]
    OutOfRange { x: f64, x_max: u64 },

    #[error("pole of the zeta function at s = 1")]
    Pole,

    #[error("character {0} is not primitive; reduce it to its inducing character first")]
    NotPrimitive(String),

    #[error("unknown extension id `{0}`")]
    UnknownExtension(String),

    #[error("unknown conjugacy class `{class}` for extension `{ext}`")]
    UnknownClass { ext: String, class: String },

    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("zeros for {0} are not certified")]
    Uncertified(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("exact identity violated: {0}")]
    IdentityViolation(String),

    #[error("malformed data file: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl ChebError {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        ChebError::InvalidArgument(msg.into())
    }
}
