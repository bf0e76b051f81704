//! RF harvesting aggregation, the sigmoid rectifier model and the RIS
//! power-consumption model.

use serde::{Deserialize, Serialize};

use crate::channel::ChannelRealization;
use crate::error::{Error, Result};

/// Nonlinear rectifier `(a, b, P_max)` behind a corporate-feed combiner with
/// efficiency `eta_rf`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HarvesterModel {
    /// Steepness, 1/W.
    pub a: f64,
    /// Turn-on midpoint, W.
    pub b: f64,
    /// Saturation DC power, W.
    pub p_max: f64,
    pub eta_rf: f64,
}

impl HarvesterModel {
    pub fn new(a: f64, b: f64, p_max: f64, eta_rf: f64) -> Result<Self> {
        let m = Self { a, b, p_max, eta_rf };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.a > 0.0 && self.b > 0.0 && self.p_max > 0.0) || !(self.a * self.b).is_finite() {
            return Err(Error::domain("rectifier parameters a, b, p_max must be positive and finite"));
        }
        if !(self.eta_rf > 0.0 && self.eta_rf <= 1.0) {
            return Err(Error::domain(format!("combining efficiency {} outside (0, 1]", self.eta_rf)));
        }
        Ok(())
    }
}

/// Static/dynamic consumption of the control chips and tuning elements.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RisPowerModel {
    /// Per-cell static consumption, W.
    pub p_static: f64,
    /// Per-cell consumption while reconfiguring, W.
    pub p_dynamic: f64,
    /// Probability that a cell changes state in a reconfiguration.
    pub alpha: f64,
    /// Fraction of time spent reconfiguring.
    pub p_r: f64,
}

impl RisPowerModel {
    pub fn new(p_static: f64, p_dynamic: f64, alpha: f64, p_r: f64) -> Result<Self> {
        let m = Self {
            p_static,
            p_dynamic,
            alpha,
            p_r,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.p_static >= 0.0 && self.p_dynamic >= 0.0) {
            return Err(Error::domain("consumption terms must be non-negative"));
        }
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(Error::domain(format!("state-change probability {} outside [0, 1]", self.alpha)));
        }
        if !(0.0..=1.0).contains(&self.p_r) {
            return Err(Error::domain(format!("reconfiguration duty {} outside [0, 1]", self.p_r)));
        }
        Ok(())
    }

    /// Equivalent continuous dynamic consumption per cell, `alpha p_r P_dynamic`.
    pub fn p_d_avg(&self) -> f64 {
        self.alpha * self.p_r * self.p_dynamic
    }
}

/// `M_s (P_static + P_d^avg)`: the DC power the harvester must deliver.
pub fn ris_consumption(model: &RisPowerModel, m_s: usize) -> Result<f64> {
    if m_s == 0 {
        return Err(Error::domain("RIS must have at least one cell"));
    }
    Ok(m_s as f64 * (model.p_static + model.p_d_avg()))
}

/// `sum_{i in A_h} |h_t[i]|^2`, summed in ascending index order.
pub fn harvest_gain_sum(channels: &ChannelRealization, a_h: &[usize]) -> Result<f64> {
    let n = channels.num_cells();
    let mut sum = 0.0;
    for &i in a_h {
        if i >= n {
            return Err(Error::domain(format!("cell index {i} out of range for {n} cells")));
        }
        sum += channels.mag_t(i).powi(2);
    }
    Ok(sum)
}

/// RF power delivered to the rectifier, `eta_RF P_t sum_{A_h} |h_t|^2`.
pub fn harvested_rf_power(channels: &ChannelRealization, a_h: &[usize], p_t: f64, model: &HarvesterModel) -> Result<f64> {
    Ok(model.eta_rf * p_t * harvest_gain_sum(channels, a_h)?)
}

#[inline]
fn sigmoid(t: f64) -> f64 {
    if t >= 0.0 {
        1.0 / (1.0 + (-t).exp())
    } else {
        let e = t.exp();
        e / (1.0 + e)
    }
}

/// Normalized sigmoid rectifier output.
///
/// Evaluates `[P_max s(a(x-b)) - P_max s(-ab)] / s(ab)` in the factored form
/// `P_max s(a(x-b)) (1 - e^{-a x})`, which is exactly zero at `x = 0` and free
/// of cancellation for small inputs.
pub fn rectifier_dc_power(p_harv: f64, model: &HarvesterModel) -> Result<f64> {
    if !(p_harv >= 0.0) {
        return Err(Error::domain(format!("harvested RF power must be non-negative, got {p_harv}")));
    }
    let out = model.p_max * sigmoid(model.a * (p_harv - model.b)) * -(-model.a * p_harv).exp_m1();
    Ok(out.max(0.0))
}

/// Inverse of [`rectifier_dc_power`]: the RF input that yields `p_dc_target`.
///
/// With `r = P_target / P_max` the closed form reads
/// `x = [ln(1 + r e^{ab}) - ln(1 - r)] / a`, algebraically the logarithmic
/// inverse `b - (1/a) ln(P_max / (P_target s(ab) + P_max s(-ab)) - 1)`.
pub fn required_rf_input(p_dc_target: f64, model: &HarvesterModel) -> Result<f64> {
    if !(p_dc_target >= 0.0) {
        return Err(Error::domain(format!("DC target must be non-negative, got {p_dc_target}")));
    }
    if p_dc_target >= model.p_max {
        return Err(Error::Infeasible(format!(
            "DC target {p_dc_target} W is at or above rectifier saturation {} W",
            model.p_max
        )));
    }
    let r = p_dc_target / model.p_max;
    let x = ((r * (model.a * model.b).exp()).ln_1p() - (-r).ln_1p()) / model.a;
    Ok(x)
}

/// DC output for an allocation's harvesting set.
pub fn dc_power(channels: &ChannelRealization, a_h: &[usize], p_t: f64, model: &HarvesterModel) -> Result<f64> {
    rectifier_dc_power(harvested_rf_power(channels, a_h, p_t, model)?, model)
}
