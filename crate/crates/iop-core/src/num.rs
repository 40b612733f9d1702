//! Scalar abstraction and physical constants.
//!
//! All channel math in this crate is generic over the floating-point type via
//! the [`Scalar`] trait, so the same formulas run in `f32` or `f64`. The
//! crate-root type aliases fix `f64` as the everyday default; `f32` is mainly
//! useful for bulk sweeps where memory bandwidth dominates.

use core::fmt::{Debug, Display};
use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating-point scalar usable by the channel model.
pub trait Scalar:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Send + Sync + 'static
{
    /// Lift an `f64` constant into this scalar type.
    fn c64(v: f64) -> Self {
        Self::from_f64(v).expect("constant must be representable")
    }
}

impl<T> Scalar for T where
    T: Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Send + Sync + 'static
{
}

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Boltzmann constant, J/K.
pub const BOLTZMANN: f64 = 1.380_649e-23;

/// Conversion factor from nepers to decibels: 10·log10(e).
///
/// A power absorption coefficient `alpha` (1/m) over distance `d` costs
/// `DB_PER_NEPER * alpha * d` dB.
pub const DB_PER_NEPER: f64 = 4.342_944_819_032_518;

/// Speed of light as a generic scalar.
pub fn light_speed<S: Scalar>() -> S {
    S::c64(SPEED_OF_LIGHT)
}

/// In-medium wavelength `c / (n·f)` in meters.
pub fn wavelength_in<S: Scalar>(frequency_hz: S, refractive_index: S) -> S {
    light_speed::<S>() / (refractive_index * frequency_hz)
}

/// Convert a power ratio to decibels.
pub fn power_to_db<S: Scalar>(ratio: S) -> S {
    S::c64(10.0) * ratio.log10()
}

/// Convert decibels to a power ratio.
pub fn db_to_power<S: Scalar>(db: S) -> S {
    S::c64(10.0).powf(db / S::c64(10.0))
}
