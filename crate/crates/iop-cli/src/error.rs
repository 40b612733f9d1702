//! CLI error taxonomy and process exit codes.

use thiserror::Error;

/// Failure of a CLI run, split by exit code: configuration problems exit
/// with 2, model/calibration problems with 3.
#[derive(Debug, Error)]
pub enum CliError {
    /// The run could not start: bad flags, unreadable or invalid
    /// configuration, unwritable output.
    #[error("{0}")]
    Config(String),

    /// The configuration was well-formed but the model could not evaluate
    /// it: infeasible geometry, domain violations, failed calibration.
    #[error("{0}")]
    Model(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Model(_) => 3,
        }
    }

    pub fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }
}

impl From<iop_core::Error> for CliError {
    fn from(e: iop_core::Error) -> Self {
        use iop_core::Error::*;
        match e {
            // Problems with what the user asked for.
            InvalidMaterial { .. } | UnknownMaterial(_) | DuplicateMaterial(_)
            | MaterialsFile { .. } | InvalidConfig(_) => CliError::Config(e.to_string()),
            // Problems with what the model can do.
            FrequencyOutOfRange { .. } | NoCriticalAngle { .. } | InfeasibleLateralPath { .. }
            | InvalidPlacement(_) | InvalidStack(_) | Domain(_) | DegeneratePair
            | CalibrationFailure(_) => CliError::Model(e.to_string()),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
