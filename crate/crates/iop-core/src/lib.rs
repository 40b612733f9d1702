//! Channel model and network simulator for terahertz transceivers embedded
//! in a paint layer on a plastered wall.
//!
//! Millimeter-scale radios buried in paint talk to each other through the
//! layer itself. The wave that connects two of them is not one ray but five:
//! a direct ray, one bounce off each face of the paint layer, and two
//! lateral waves that skim along those faces in the neighboring medium (air
//! above, plaster below) after striking them at the critical angle. Because
//! paint is both thin and strongly absorbing at terahertz frequencies, the
//! balance between these paths flips with node depth and separation: direct
//! and bounced rays win up close, the air-side lateral wave wins at range.
//!
//! Module map:
//!
//! * [`materials`] - refractive indices, absorption profiles, presets, and
//!   the JSON materials-file format.
//! * [`geometry`] - the air/paint/plaster stack and the five path
//!   constructions.
//! * [`propagation`] - per-path loss budgets (spreading, absorption,
//!   reflection, roughness), channel combining, and absorption calibration
//!   against reference attenuation deltas.
//! * [`noise`] - thermal floor plus molecular re-emission.
//! * [`capacity`] - sub-banded Shannon capacity, with a free-air reference
//!   link.
//! * [`netsim`] - seeded Monte Carlo connectivity of dense node populations.
//!
//! All physics is generic over the floating-point scalar via [`Scalar`]
//! (`f64` by default, `f32` supported); the Monte Carlo layer is `f64`.
//! The `*64` aliases at the crate root name the concrete default types.

pub mod capacity;
pub mod error;
pub mod geometry;
pub mod materials;
pub mod netsim;
pub mod noise;
pub mod num;
pub mod propagation;

pub use error::{Error, Result};
pub use num::{
    db_to_power, light_speed, power_to_db, wavelength_in, Scalar, BOLTZMANN, DB_PER_NEPER,
    SPEED_OF_LIGHT,
};

pub use capacity::{air_capacity, link_capacity, Band, CapacityReport, LinkBudget};
pub use geometry::{
    critical_angle, Interface, LateralParts, LayerStack, MediumRole, PathGeometry, PathKind,
    Placement, Segment,
};
pub use materials::{
    absorption_from_loss_tangent, atmospheric_alpha, load_materials, load_materials_str,
    materials_to_json, refractive_from_permittivity, AbsorptionProfile, AlphaSample, MaterialDb,
    MediumSpec, Provenance,
};
pub use netsim::{
    pair_link, run_netsim, trial_graph, Aggregate, Antenna, LinkRule, NetSimConfig, NetSimReport,
    NodeSample, Parallelism, TrialGraph, TrialResult,
};
pub use noise::{molecular_noise_psd, thermal_noise_psd, total_noise_psd, NoisePsd};
pub use propagation::{
    absorption_loss_db, calibrate_absorption, channel_response, fresnel_magnitude, path_loss,
    path_loss_for, reference_deltas, roughness_loss_db, span_delta_db, spreading_loss_db,
    AttenuationDeltas, Calibration, CalibrationTargets, ChannelResponse, Combining, ModelParams,
    NoisePathPolicy, PathLoss, Polarization,
};

/// Concrete default-precision aliases.
pub type MediumSpec64 = materials::MediumSpec<f64>;
pub type MaterialDb64 = materials::MaterialDb<f64>;
pub type LayerStack64 = geometry::LayerStack<f64>;
pub type Placement64 = geometry::Placement<f64>;
pub type PathGeometry64 = geometry::PathGeometry<f64>;
pub type ModelParams64 = propagation::ModelParams<f64>;
pub type PathLoss64 = propagation::PathLoss<f64>;
pub type ChannelResponse64 = propagation::ChannelResponse<f64>;
pub type Calibration64 = propagation::Calibration<f64>;
pub type Band64 = capacity::Band<f64>;
pub type LinkBudget64 = capacity::LinkBudget<f64>;
pub type CapacityReport64 = capacity::CapacityReport<f64>;
