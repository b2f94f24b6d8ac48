//! Device-level optical models: conversion break-even length, ring resonator
//! quality factor and bandwidth, thermal drift, and the loss-to-laser-power
//! map. Everything downstream prices links through these few functions.
//!
//! Unit conventions, fixed across the whole crate:
//! delays ps, lengths mm (ring circumference um, wavelengths nm),
//! temperatures degrees C, power mW, waveguide loss dB/cm.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Rings per optical link: one modulator, one detector.
pub const RINGS_PER_LINK: usize = 2;

#[derive(Debug, Error, PartialEq)]
pub enum OilError {
    #[error("invalid device model: {0}")]
    InvalidModel(String),
    #[error("invalid ring geometry: {0}")]
    InvalidGeometry(String),
}

/// Technology and power constants shared by every stage of the flow.
///
/// Defaults describe a 1550 nm WDM process on copper-comparable timing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeviceModels {
    /// Optical propagation delay, ps/mm.
    pub tau_o: f64,
    /// Electrical (repeated wire) propagation delay, ps/mm.
    pub tau_e: f64,
    /// Total E-O plus O-E conversion latency, ps.
    pub tau_conv: f64,
    /// Waveguide propagation loss, dB/cm.
    pub alpha_wg: f64,
    /// Modulator insertion loss, dB.
    pub loss_mod_db: f64,
    /// Minimum detectable optical power at the receiver, mW.
    pub p_det_sense: f64,
    /// Laser power budget per channel, mW.
    pub p_laser_max: f64,
    /// Dynamic power per active wavelength channel, mW.
    pub p_channel: f64,
    /// Static power per active trunk, mW.
    pub p_trunk_base: f64,
    /// Power per active waveguide crossing, mW.
    pub p_cross_unit: f64,
    /// Trunk thermal tuning coefficient, mW per degC*mm of integrated drift.
    pub k_trunk_thm: f64,
    /// Ring thermal tuning coefficient, mW per unit of bandwidth ratio.
    pub k_ring_thm: f64,
    /// Nominal carrier wavelength, nm.
    pub lambda0: f64,
    /// Resonance drift sensitivity, nm per degC.
    pub drift_sens: f64,
    /// WDM channel spacing, nm.
    pub channel_spacing: f64,
    /// Nominal ring quality factor used for bandwidth ratios.
    pub q_nominal: f64,
    /// Maximum tolerated temperature variation at a device, degC.
    pub temp_threshold: f64,
}

impl Default for DeviceModels {
    fn default() -> Self {
        DeviceModels {
            tau_o: 11.0,
            tau_e: 37.0,
            tau_conv: 96.2,
            alpha_wg: 1.5,
            loss_mod_db: 2.0,
            p_det_sense: 0.1,
            p_laser_max: 10.0,
            p_channel: 0.2,
            p_trunk_base: 1.0,
            p_cross_unit: 0.05,
            k_trunk_thm: 0.01,
            k_ring_thm: 0.1,
            lambda0: 1550.0,
            drift_sens: 0.12,
            channel_spacing: 0.8,
            q_nominal: 8869.0,
            temp_threshold: 15.0,
        }
    }
}

impl DeviceModels {
    pub fn validate(&self) -> Result<(), OilError> {
        let positive = [
            ("tau_o", self.tau_o),
            ("tau_e", self.tau_e),
            ("tau_conv", self.tau_conv),
            ("p_det_sense", self.p_det_sense),
            ("p_laser_max", self.p_laser_max),
            ("lambda0", self.lambda0),
            ("channel_spacing", self.channel_spacing),
            ("q_nominal", self.q_nominal),
            ("temp_threshold", self.temp_threshold),
        ];
        for (name, v) in positive {
            if !(v > 0.0) || !v.is_finite() {
                return Err(OilError::InvalidModel(format!("{name} must be > 0, got {v}")));
            }
        }
        let non_negative = [
            ("alpha_wg", self.alpha_wg),
            ("loss_mod_db", self.loss_mod_db),
            ("p_channel", self.p_channel),
            ("p_trunk_base", self.p_trunk_base),
            ("p_cross_unit", self.p_cross_unit),
            ("k_trunk_thm", self.k_trunk_thm),
            ("k_ring_thm", self.k_ring_thm),
            ("drift_sens", self.drift_sens),
        ];
        for (name, v) in non_negative {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(OilError::InvalidModel(format!("{name} must be >= 0, got {v}")));
            }
        }
        if self.tau_e <= self.tau_o {
            return Err(OilError::InvalidModel(format!(
                "tau_e ({}) must exceed tau_o ({}) or optics never wins",
                self.tau_e, self.tau_o
            )));
        }
        Ok(())
    }
}

/// Ring resonator geometry. Circumference in um; coupling/loss unitless.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RingGeometry {
    /// Self-coupling coefficient of the input coupler.
    pub r1: f64,
    /// Self-coupling coefficient of the drop coupler.
    pub r2: f64,
    /// Single-pass amplitude transmission.
    pub a: f64,
    /// Ring circumference, um.
    pub circumference_um: f64,
    /// Group index of the ring waveguide.
    pub n_g: f64,
}

/// Length above which an optical link beats a repeated wire, mm.
///
/// Conversion overhead amortizes at `tau_conv / (tau_e - tau_o)`.
pub fn critical_length(models: &DeviceModels) -> Result<f64, OilError> {
    if models.tau_e <= models.tau_o {
        return Err(OilError::InvalidModel(format!(
            "tau_e ({}) must exceed tau_o ({})",
            models.tau_e, models.tau_o
        )));
    }
    if !(models.tau_conv > 0.0) {
        return Err(OilError::InvalidModel(format!(
            "tau_conv must be > 0, got {}",
            models.tau_conv
        )));
    }
    Ok(models.tau_conv / (models.tau_e - models.tau_o))
}

/// Loaded quality factor of an all-pass/add-drop ring.
///
/// `lambda0` in nm. The circumference is um, so the wavelength is converted
/// to um internally; Q itself is dimensionless.
pub fn ring_q_factor(g: &RingGeometry, lambda0_nm: f64) -> Result<f64, OilError> {
    for (name, v) in [("r1", g.r1), ("r2", g.r2), ("a", g.a)] {
        if !(v > 0.0 && v < 1.0) {
            return Err(OilError::InvalidGeometry(format!(
                "{name} must lie in (0, 1), got {v}"
            )));
        }
    }
    if !(g.circumference_um > 0.0) {
        return Err(OilError::InvalidGeometry(format!(
            "circumference must be > 0 um, got {}",
            g.circumference_um
        )));
    }
    if !(g.n_g > 0.0) {
        return Err(OilError::InvalidGeometry(format!("n_g must be > 0, got {}", g.n_g)));
    }
    if !(lambda0_nm > 0.0) {
        return Err(OilError::InvalidGeometry(format!(
            "lambda0 must be > 0 nm, got {lambda0_nm}"
        )));
    }
    let rra = g.r1 * g.r2 * g.a;
    let lambda_um = lambda0_nm / 1000.0;
    Ok(rra.sqrt() * g.circumference_um * std::f64::consts::PI * g.n_g
        / ((1.0 - rra) * lambda_um))
}

/// Group index from an effective-index dispersion curve at `lambda_nm`:
/// `n_g = n_e - lambda * dn_e/dlambda`, central difference with a relative
/// step of 1e-6.
pub fn group_index(n_e: impl Fn(f64) -> f64, lambda_nm: f64) -> f64 {
    let h = lambda_nm * 1e-6;
    let slope = (n_e(lambda_nm + h) - n_e(lambda_nm - h)) / (2.0 * h);
    n_e(lambda_nm) - lambda_nm * slope
}

/// 3 dB channel bandwidth in GHz for a resonance at `f_thz` with quality `q`.
pub fn channel_bandwidth(f_thz: f64, q: f64) -> Result<f64, OilError> {
    if !(q > 0.0) {
        return Err(OilError::InvalidGeometry(format!("Q must be > 0, got {q}")));
    }
    if !(f_thz > 0.0) {
        return Err(OilError::InvalidGeometry(format!(
            "resonant frequency must be > 0 THz, got {f_thz}"
        )));
    }
    Ok(f_thz * 1000.0 / q)
}

/// Resonance wavelength drift in nm for a temperature variation `delta_t_c`.
pub fn thermal_drift(delta_t_c: f64, models: &DeviceModels) -> f64 {
    models.drift_sens * delta_t_c.abs()
}

/// Thermal tuning verdict for one ring at temperature variation `delta_t_c`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RingPenalty {
    /// False when the required bandwidth exceeds the channel spacing and the
    /// ring would alias onto a neighboring channel.
    pub feasible: bool,
    /// Tuning power per ring, mW. Zero when infeasible.
    pub p_ring: f64,
}

/// Ring tuning cost: drift must be absorbed on both sides of the resonance,
/// so the required bandwidth is twice the drift. Aliasing past one channel
/// spacing cannot be tuned out.
pub fn ring_thermal_penalty(delta_t_c: f64, models: &DeviceModels) -> RingPenalty {
    let bw_req = 2.0 * thermal_drift(delta_t_c, models);
    if bw_req > models.channel_spacing {
        return RingPenalty { feasible: false, p_ring: 0.0 };
    }
    let fwhm_nm = models.lambda0 / models.q_nominal;
    RingPenalty { feasible: true, p_ring: models.k_ring_thm * bw_req / fwhm_nm }
}

/// Laser power needed above the detector floor to push a signal through
/// `loss_db` of optical loss, mW.
pub fn loss_to_power(loss_db: f64, models: &DeviceModels) -> Result<f64, OilError> {
    if loss_db < 0.0 || !loss_db.is_finite() {
        return Err(OilError::InvalidModel(format!("loss must be >= 0 dB, got {loss_db}")));
    }
    Ok(models.p_det_sense * (10f64.powf(loss_db / 10.0) - 1.0))
}
