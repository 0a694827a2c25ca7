use std::process::ExitCode;

use bilage::kernel_finite::KernelError;
use bilage::limits::LimitsError;
use thiserror::Error;

/// Failures of a subcommand, each mapped to one exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Argument(String),
    #[error("{0}")]
    Tolerance(String),
    #[error("{0}")]
    Identity(String),
    #[error("{0}")]
    NonMonotone(String),
    #[error("cannot write output: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            CliError::Argument(_) | CliError::Io(_) => 1,
            CliError::Tolerance(_) => 2,
            CliError::Identity(_) => 3,
            CliError::NonMonotone(_) => 4,
        })
    }
}

impl From<KernelError> for CliError {
    fn from(e: KernelError) -> Self {
        match e {
            KernelError::TooLarge { .. }
            | KernelError::NonPositiveArgument { .. }
            | KernelError::Domain(_)
            | KernelError::Params(_) => CliError::Argument(e.to_string()),
            _ => CliError::Tolerance(e.to_string()),
        }
    }
}

impl From<LimitsError> for CliError {
    fn from(e: LimitsError) -> Self {
        match e {
            LimitsError::Domain(_) | LimitsError::Params(_) => CliError::Argument(e.to_string()),
            LimitsError::Kernel(k) => k.into(),
            _ => CliError::Tolerance(e.to_string()),
        }
    }
}

pub fn argument(msg: impl Into<String>) -> CliError {
    CliError::Argument(msg.into())
}
