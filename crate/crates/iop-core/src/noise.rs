//! Receiver noise: thermal floor plus molecular re-emission.
//!
//! The floor is `k*T` scaled by the receiver noise figure. On top of it the
//! absorbing medium radiates back a fraction of what it absorbs: an
//! emissivity `1 - tau` at physical temperature `T`, where `tau` is the
//! power transmissivity of the absorbing span. With the default policy the
//! span is the dominant path of the link, so a link that loses little to
//! absorption also hears little re-emission. Both pieces are white over the
//! narrow sub-bands used for capacity integration.

use crate::error::{Error, Result};
use crate::geometry::{LayerStack, Placement};
use crate::num::{Scalar, BOLTZMANN};
use crate::propagation::{channel_response, Combining, ModelParams, NoisePathPolicy};

/// Noise power spectral density split into its two sources, W/Hz.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoisePsd<S = f64> {
    pub thermal_w_per_hz: S,
    pub molecular_w_per_hz: S,
}

impl<S: Scalar> NoisePsd<S> {
    pub fn total(&self) -> S {
        self.thermal_w_per_hz + self.molecular_w_per_hz
    }
}

/// Thermal noise floor `k*T*10^(NF/10)` in W/Hz.
pub fn thermal_noise_psd<S: Scalar>(temperature_k: S, noise_figure_db: S) -> S {
    S::c64(BOLTZMANN) * temperature_k * crate::num::db_to_power(noise_figure_db)
}

/// Molecular re-emission `k*T*(1 - tau)` in W/Hz for a span of power
/// transmissivity `tau` in `[0, 1]`.
pub fn molecular_noise_psd<S: Scalar>(transmissivity: S, temperature_k: S) -> Result<S> {
    if !(transmissivity >= S::zero() && transmissivity <= S::one()) {
        return Err(Error::Domain(format!(
            "transmissivity must lie in [0, 1], got {transmissivity}"
        )));
    }
    Ok(S::c64(BOLTZMANN) * temperature_k * (S::one() - transmissivity))
}

/// Noise density seen by the receiver of a link at one frequency.
///
/// The molecular term follows `params.noise_path`: with
/// [`NoisePathPolicy::DominantPath`] the emissivity comes from the dominant
/// path's absorption loss, with [`NoisePathPolicy::ThermalOnly`] it is zero.
pub fn total_noise_psd<S: Scalar>(
    stack: &LayerStack<S>,
    placement: &Placement<S>,
    frequency_hz: S,
    params: &ModelParams<S>,
) -> Result<NoisePsd<S>> {
    let thermal = thermal_noise_psd(params.temperature_k, params.noise_figure_db);
    let molecular = match params.noise_path {
        NoisePathPolicy::ThermalOnly => S::zero(),
        NoisePathPolicy::DominantPath => {
            let response =
                channel_response(stack, placement, frequency_hz, params, Combining::Noncoherent)?;
            let tau = crate::num::db_to_power(-response.dominant_loss().absorption_db);
            molecular_noise_psd(tau, params.temperature_k)?
        }
    };
    Ok(NoisePsd {
        thermal_w_per_hz: thermal,
        molecular_w_per_hz: molecular,
    })
}

/// Noise density for a span whose dominant absorption loss is already known
/// (avoids re-evaluating the channel when the caller just computed it).
pub(crate) fn span_noise_psd<S: Scalar>(
    absorption_db: S,
    params: &ModelParams<S>,
) -> Result<NoisePsd<S>> {
    let thermal = thermal_noise_psd(params.temperature_k, params.noise_figure_db);
    let molecular = match params.noise_path {
        NoisePathPolicy::ThermalOnly => S::zero(),
        NoisePathPolicy::DominantPath => {
            let tau = crate::num::db_to_power(-absorption_db);
            molecular_noise_psd(tau, params.temperature_k)?
        }
    };
    Ok(NoisePsd {
        thermal_w_per_hz: thermal,
        molecular_w_per_hz: molecular,
    })
}

// ---------------------------------------------------------------------------
