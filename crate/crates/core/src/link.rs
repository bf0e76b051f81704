//! Receiver noise and end-to-end SNR through the reflecting cells.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::channel::ChannelRealization;
use crate::error::{Error, Result};
use crate::units::{from_db, BOLTZMANN, REFERENCE_TEMPERATURE};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    /// Hz.
    pub bandwidth: f64,
    pub noise_figure_db: f64,
    /// K.
    pub reference_temperature: f64,
}

impl NoiseModel {
    pub fn new(bandwidth: f64, noise_figure_db: f64) -> Result<Self> {
        Self::with_temperature(bandwidth, noise_figure_db, REFERENCE_TEMPERATURE)
    }

    pub fn with_temperature(bandwidth: f64, noise_figure_db: f64, reference_temperature: f64) -> Result<Self> {
        if !(bandwidth > 0.0) || !bandwidth.is_finite() {
            return Err(Error::domain("bandwidth must be positive"));
        }
        if !(reference_temperature > 0.0) {
            return Err(Error::domain("reference temperature must be positive"));
        }
        if !noise_figure_db.is_finite() {
            return Err(Error::domain("noise figure must be finite"));
        }
        Ok(Self {
            bandwidth,
            noise_figure_db,
            reference_temperature,
        })
    }
}

/// Thermal noise power `k_B T_0 W F`, W.
pub fn noise_power(model: &NoiseModel) -> f64 {
    BOLTZMANN * model.reference_temperature * model.bandwidth * from_db(model.noise_figure_db)
}

/// Per-cell phase responses, radians. Entries of non-reflecting cells are ignored.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseConfig {
    pub phi: Vec<f64>,
}

impl PhaseConfig {
    pub fn zeros(m_s: usize) -> Self {
        Self { phi: vec![0.0; m_s] }
    }
}

fn check_indices(channels: &ChannelRealization, set: &[usize]) -> Result<()> {
    let n = channels.num_cells();
    match set.iter().find(|&&k| k >= n) {
        Some(k) => Err(Error::domain(format!("cell index {k} out of range for {n} cells"))),
        None => Ok(()),
    }
}

fn check_sigma(sigma_sq: f64) -> Result<()> {
    if !(sigma_sq > 0.0) {
        return Err(Error::domain("noise power must be positive"));
    }
    Ok(())
}

/// SNR for an arbitrary phase configuration:
/// `(P_t/sigma^2) |sum_k |h_t||h_r| e^{j(phi_k + arg h_t + arg h_r)}|^2`.
pub fn snr_with_phases(channels: &ChannelRealization, a_r: &[usize], phases: &PhaseConfig, p_t: f64, sigma_sq: f64) -> Result<f64> {
    check_indices(channels, a_r)?;
    check_sigma(sigma_sq)?;
    if phases.phi.len() < channels.num_cells() {
        return Err(Error::domain("phase configuration shorter than the cell count"));
    }
    if !phases.phi.iter().all(|p| p.is_finite()) {
        return Err(Error::domain("phases must be finite"));
    }
    let field: Complex64 = a_r
        .iter()
        .map(|&k| {
            let (t, r) = (channels.h_t[k], channels.h_r[k]);
            Complex64::from_polar(t.magnitude * r.magnitude, phases.phi[k] + t.phase + r.phase)
        })
        .sum();
    Ok(p_t / sigma_sq * field.norm_sqr())
}

/// Co-phasing configuration `phi_k = -arg h_t[k] - arg h_r[k]` on `a_r`.
pub fn optimal_phases(channels: &ChannelRealization, a_r: &[usize]) -> Result<PhaseConfig> {
    if a_r.is_empty() {
        return Err(Error::domain("optimal phases need at least one reflecting cell"));
    }
    check_indices(channels, a_r)?;
    let mut cfg = PhaseConfig::zeros(channels.num_cells());
    for &k in a_r {
        cfg.phi[k] = -channels.h_t[k].phase - channels.h_r[k].phase;
    }
    Ok(cfg)
}

/// `sum_{k in a_r} |h_t[k]| |h_r[k]|` in the order given.
pub fn coherent_amplitude(channels: &ChannelRealization, a_r: &[usize]) -> Result<f64> {
    check_indices(channels, a_r)?;
    Ok(a_r.iter().map(|&k| channels.product_gain(k)).sum())
}

/// Maximum SNR at co-phased reflection, `(P_t/sigma^2) (sum |h_t||h_r|)^2`.
pub fn max_snr(channels: &ChannelRealization, a_r: &[usize], p_t: f64, sigma_sq: f64) -> Result<f64> {
    check_sigma(sigma_sq)?;
    let amp = coherent_amplitude(channels, a_r)?;
    Ok(p_t / sigma_sq * amp * amp)
}
