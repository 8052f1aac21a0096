// SPDX-License-Identifier: Apache-2.0

use cheb_core::ChebError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("uncertified analytic data: {0}")]
    Uncertified(String),

    #[error("identity check failed: {0}")]
    Identity(String),

    #[error(transparent)]
    Core(#[from] ChebError),

    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    /// 2: invalid config, 3: uncertified analytic data, 4: exact identity violated.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Uncertified(_) => 3,
            CliError::Identity(_) => 4,
            CliError::Core(e) => match e {
                ChebError::InvalidArgument(_)
                | ChebError::OutOfRange { .. }
                | ChebError::Pole
                | ChebError::NotPrimitive(_)
                | ChebError::UnknownExtension(_)
                | ChebError::UnknownClass { .. }
                | ChebError::Parse { .. }
                | ChebError::Unsupported(_) => 2,
                ChebError::Uncertified(_) => 3,
                ChebError::IdentityViolation(_) => 4,
                ChebError::Format(_) | ChebError::Io(_) => 1,
            },
            CliError::Io(_) | CliError::Csv(_) | CliError::Json(_) => 1,
        }
    }
}
