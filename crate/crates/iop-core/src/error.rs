//! Error taxonomy shared by all model modules.

use thiserror::Error;

/// Everything that can go wrong while building or evaluating the model.
#[derive(Debug, Error)]
pub enum Error {
    /// A material definition violates a physical constraint.
    #[error("invalid material '{name}': {reason}")]
    InvalidMaterial { name: String, reason: String },

    /// A material name was requested that the database does not contain.
    #[error("unknown material '{0}'")]
    UnknownMaterial(String),

    /// A materials file entry name collides with another entry in the same file.
    #[error("duplicate material '{0}' in file")]
    DuplicateMaterial(String),

    /// A materials file could not be read or parsed.
    #[error("materials file '{path}': {reason}")]
    MaterialsFile { path: String, reason: String },

    /// A frequency lies outside the range a lookup table covers.
    #[error("frequency {frequency_hz} Hz outside supported range [{min_hz}, {max_hz}] Hz")]
    FrequencyOutOfRange {
        frequency_hz: f64,
        min_hz: f64,
        max_hz: f64,
    },

    /// Total internal reflection geometry does not exist for this index pair.
    #[error("no critical angle: dense index {n_dense} must exceed rare index {n_rare}")]
    NoCriticalAngle { n_dense: f64, n_rare: f64 },

    /// The requested lateral path cannot be traced: the horizontal interface
    /// run would be zero or negative at the critical angle.
    #[error("infeasible lateral path: interface run {interface_run_m} m is not positive")]
    InfeasibleLateralPath { interface_run_m: f64 },

    /// A transceiver placement violates the layer geometry.
    #[error("invalid placement: {0}")]
    InvalidPlacement(String),

    /// A layer stack is not physically meaningful.
    #[error("invalid layer stack: {0}")]
    InvalidStack(String),

    /// A scalar argument is outside its mathematical domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// Two network devices coincide, so no link can be evaluated between them.
    #[error("degenerate pair: devices are co-located")]
    DegeneratePair,

    /// Absorption calibration could not reproduce the requested deltas.
    #[error("calibration failure: {0}")]
    CalibrationFailure(String),

    /// A run configuration is structurally valid but semantically unusable.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

/// Crate-wide result alias.
pub type Result<T> = core::result::Result<T, Error>;
