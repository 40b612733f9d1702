//! Shannon capacity over a sub-banded terahertz window.
//!
//! The band is split into equal sub-bands evaluated at their centers, where
//! gain and noise are treated as flat: `C = sum(df * log2(1 + snr_i))`. This
//! midpoint rule converges quadratically in the sub-band count, so the
//! default of 256 leaves discretization error far below every tolerance used
//! in this crate.
//!
//! Two link flavors share the machinery: an in-paint link combining all
//! feasible paths, and a free-air reference link of the same length used to
//! quantify what embedding in paint costs.

use crate::error::{Error, Result};
use crate::geometry::{LayerStack, Placement};
use crate::materials::MediumSpec;
use crate::noise::span_noise_psd;
use crate::num::{db_to_power, power_to_db, Scalar};
use crate::propagation::{
    absorption_loss_db, channel_response, spreading_loss_db, Combining, ModelParams,
};

/// Contiguous frequency band, Hz.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Band<S = f64> {
    lo_hz: S,
    hi_hz: S,
}

impl<S: Scalar> Band<S> {
    pub fn new(lo_hz: S, hi_hz: S) -> Result<Self> {
        if !(lo_hz > S::zero()) || !(hi_hz > lo_hz) || !hi_hz.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "band must satisfy 0 < lo < hi, got [{lo_hz}, {hi_hz}]"
            )));
        }
        Ok(Self { lo_hz, hi_hz })
    }

    pub fn lo_hz(&self) -> S {
        self.lo_hz
    }

    pub fn hi_hz(&self) -> S {
        self.hi_hz
    }

    pub fn width_hz(&self) -> S {
        self.hi_hz - self.lo_hz
    }
}

/// Transmit density and integration resolution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkBudget<S = f64> {
    /// Flat transmit power spectral density, W/Hz.
    pub tx_psd_w_per_hz: S,
    /// Number of equal sub-bands for the capacity integral.
    pub n_subbands: usize,
}

impl<S: Scalar> Default for LinkBudget<S> {
    fn default() -> Self {
        Self {
            tx_psd_w_per_hz: S::c64(1.0e-14),
            n_subbands: 256,
        }
    }
}

impl<S: Scalar> LinkBudget<S> {
    fn validate(&self) -> Result<()> {
        if !(self.tx_psd_w_per_hz >= S::zero()) || !self.tx_psd_w_per_hz.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "transmit PSD must be finite and >= 0, got {}",
                self.tx_psd_w_per_hz
            )));
        }
        if self.n_subbands == 0 {
            return Err(Error::InvalidConfig("need at least one sub-band".into()));
        }
        Ok(())
    }
}

/// Integrated capacity of one link.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CapacityReport<S = f64> {
    /// Shannon capacity over the band, bit/s.
    pub capacity_bps: S,
    /// Linear SNR averaged over the sub-bands.
    pub mean_snr: S,
}

impl<S: Scalar> CapacityReport<S> {
    /// Mean SNR in dB.
    pub fn snr_db(&self) -> S {
        power_to_db(self.mean_snr)
    }
}

fn integrate<S: Scalar>(
    band: &Band<S>,
    budget: &LinkBudget<S>,
    mut gain_and_noise: impl FnMut(S) -> Result<(S, S)>,
) -> Result<CapacityReport<S>> {
    budget.validate()?;
    let n = budget.n_subbands;
    let df = band.width_hz() / S::c64(n as f64);
    let ln2 = S::c64(2.0).ln();
    let mut capacity = S::zero();
    let mut snr_sum = S::zero();
    for i in 0..n {
        let f = band.lo_hz + df * (S::c64(i as f64) + S::c64(0.5));
        let (gain, noise) = gain_and_noise(f)?;
        let snr = budget.tx_psd_w_per_hz * gain / noise;
        capacity = capacity + df * (S::one() + snr).ln() / ln2;
        snr_sum = snr_sum + snr;
    }
    Ok(CapacityReport {
        capacity_bps: capacity,
        mean_snr: snr_sum / S::c64(n as f64),
    })
}

/// Capacity of an in-paint link: all feasible paths combined per sub-band,
/// noise following the model's noise policy.
pub fn link_capacity<S: Scalar>(
    stack: &LayerStack<S>,
    placement: &Placement<S>,
    band: &Band<S>,
    budget: &LinkBudget<S>,
    params: &ModelParams<S>,
    combining: Combining,
) -> Result<CapacityReport<S>> {
    integrate(band, budget, |f| {
        let response = channel_response(stack, placement, f, params, combining)?;
        let noise = span_noise_psd(response.dominant_loss().absorption_db, params)?;
        Ok((response.total_gain(), noise.total()))
    })
}

/// Capacity of a free-air link of length `distance_m` through `air`, the
/// reference against which in-paint links are judged.
pub fn air_capacity<S: Scalar>(
    air: &MediumSpec<S>,
    distance_m: S,
    band: &Band<S>,
    budget: &LinkBudget<S>,
    params: &ModelParams<S>,
) -> Result<CapacityReport<S>> {
    if !(distance_m > S::zero()) || !distance_m.is_finite() {
        return Err(Error::InvalidConfig(format!(
            "air link distance must be positive and finite, got {distance_m}"
        )));
    }
    let n_air = air.refractive_index();
    integrate(band, budget, |f| {
        let spread = spreading_loss_db(distance_m, f, n_air);
        let absorb = absorption_loss_db(distance_m, air.alpha_at(f).per_m);
        let gain = db_to_power(-(spread + absorb));
        let noise = span_noise_psd(absorb, params)?;
        Ok((gain, noise.total()))
    })
}

// ---------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;
    use crate::materials::MaterialDb;

    fn standard_stack() -> LayerStack<f64> {
        let db = MaterialDb::<f64>::with_presets();
        LayerStack::new(
            db.get("air").unwrap().clone(),
            db.get("titanium-white-paint").unwrap().clone(),
            db.get("plaster").unwrap().clone(),
            2.0e-3,
        )
        .unwrap()
    }

    fn band_200_300() -> Band<f64> {
        Band::new(200.0e9, 300.0e9).unwrap()
    }

    #[test]
    fn air_link_capacity_is_hundreds_of_gigabits_at_two_centimeters() {
        let db = MaterialDb::<f64>::with_presets();
        let air = db.get("air").unwrap();
        let report = air_capacity(
            air,
            0.02,
            &band_200_300(),
            &LinkBudget::default(),
            &ModelParams::default(),
        )
        .unwrap();
        assert!(
            (4.5e11..7.5e11).contains(&report.capacity_bps),
            "got {:.3e} bit/s",
            report.capacity_bps
        );
        assert!(report.mean_snr > 0.0);
    }

    #[test]
    fn paint_link_pays_dearly_against_the_air_reference() {
        let stack = standard_stack();
        let db = MaterialDb::<f64>::with_presets();
        let p = Placement::new(5.0e-5, 5.0e-5, 0.02).unwrap();
        let params = ModelParams::default();
        let paint = link_capacity(
            &stack,
            &p,
            &band_200_300(),
            &LinkBudget::default(),
            &params,
            Combining::Noncoherent,
        )
        .unwrap();
        let air = air_capacity(
            db.get("air").unwrap(),
            0.02,
            &band_200_300(),
            &LinkBudget::default(),
            &params,
        )
        .unwrap();
        assert!(paint.capacity_bps > 0.0);
        assert!(
            air.capacity_bps / paint.capacity_bps > 10.0,
            "air {:.3e} vs paint {:.3e}",
            air.capacity_bps,
            paint.capacity_bps
        );
    }

    #[test]
    fn capacity_decreases_with_distance() {
        let stack = standard_stack();
        let params = ModelParams::default();
        let cap = |rho: f64| {
            link_capacity(
                &stack,
                &Placement::new(1.0e-3, 1.0e-3, rho).unwrap(),
                &band_200_300(),
                &LinkBudget::default(),
                &params,
                Combining::Noncoherent,
            )
            .unwrap()
            .capacity_bps
        };
        let (c1, c2, c4) = (cap(0.01), cap(0.02), cap(0.04));
        assert!(c1 > c2 && c2 > c4, "{c1:.3e} {c2:.3e} {c4:.3e}");
    }

    #[test]
    fn subband_count_has_converged_at_256() {
        let stack = standard_stack();
        let params = ModelParams::default();
        let p = Placement::new(1.0e-3, 1.0e-3, 0.02).unwrap();
        let at = |n: usize| {
            link_capacity(
                &stack,
                &p,
                &band_200_300(),
                &LinkBudget {
                    n_subbands: n,
                    ..LinkBudget::default()
                },
                &params,
                Combining::Noncoherent,
            )
            .unwrap()
            .capacity_bps
        };
        let (c256, c512) = (at(256), at(512));
        assert!(
            ((c256 - c512) / c512).abs() < 1e-3,
            "256: {c256:.6e}, 512: {c512:.6e}"
        );
    }

    #[test]
    fn zero_transmit_psd_means_zero_capacity() {
        let stack = standard_stack();
        let report = link_capacity(
            &stack,
            &Placement::new(1.0e-3, 1.0e-3, 0.02).unwrap(),
            &band_200_300(),
            &LinkBudget {
                tx_psd_w_per_hz: 0.0,
                n_subbands: 16,
            },
            &ModelParams::default(),
            Combining::Noncoherent,
        )
        .unwrap();
        assert_eq!(report.capacity_bps, 0.0);
        assert_eq!(report.mean_snr, 0.0);
    }

    #[test]
    fn band_and_budget_validation() {
        assert!(Band::new(300.0e9, 200.0e9_f64).is_err());
        assert!(Band::new(0.0, 200.0e9_f64).is_err());
        let stack = standard_stack();
        let p = Placement::new(1.0e-3, 1.0e-3, 0.02).unwrap();
        let bad = LinkBudget {
            tx_psd_w_per_hz: 1.0e-14,
            n_subbands: 0,
        };
        assert!(link_capacity(
            &stack,
            &p,
            &band_200_300(),
            &bad,
            &ModelParams::default(),
            Combining::Noncoherent,
        )
        .is_err());
    }
}
