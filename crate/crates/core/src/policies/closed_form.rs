//! Stopping index of the `|h_r|`-ordered loop when every TX-link gain equals `beta`.

use super::{check_cells, descending_order, Allocation, PolicyId, PolicyOutcome, ProblemKind, ProblemSpec};
use crate::channel::ChannelRealization;
use crate::energy::{rectifier_dc_power, required_rf_input, HarvesterModel};
use crate::error::{Error, Result};

/// Index at which the reflecting-set loop first starves the harvester.
///
/// The harvester needs `M_h = ceil(P_in / (eta_RF P_t beta))` cells, where
/// `P_in` inverts the rectifier at `P_RIS`, so the loop stops at
/// `M_s + 1 - M_h` (at least 1) and keeps `M_s - M_h` reflecting cells.
/// `M_h` is confirmed against the forward model so rounding at an integer
/// boundary cannot move it. Returns `None` when the consumption is zero and
/// the loop never stops.
pub fn closed_form_istop(beta: f64, spec: &ProblemSpec, harvester: &HarvesterModel, m_s: usize) -> Result<Option<usize>> {
    spec.validate()?;
    harvester.validate()?;
    if !(beta >= 0.0) || !beta.is_finite() {
        return Err(Error::domain("per-cell gain must be finite and non-negative"));
    }
    if m_s == 0 {
        return Err(Error::domain("RIS must have at least one cell"));
    }
    let needed = required_rf_input(spec.p_ris, harvester)?;
    if needed == 0.0 {
        return Ok(None);
    }
    // Same accumulation as the harvested-power sum over n identical cells.
    let powered = |n: usize| -> Result<bool> {
        let mut sum = 0.0;
        for _ in 0..n {
            sum += beta;
        }
        Ok(rectifier_dc_power(harvester.eta_rf * spec.p_t * sum, harvester)? >= spec.p_ris)
    };
    let per_cell = harvester.eta_rf * spec.p_t * beta;
    let estimate = if per_cell > 0.0 {
        (needed / per_cell).ceil()
    } else {
        f64::INFINITY
    };
    let mut m_h = if estimate > (m_s + 1) as f64 { m_s + 1 } else { estimate as usize };
    while m_h > 0 && m_h <= m_s + 1 && powered(m_h - 1)? {
        m_h -= 1;
    }
    while m_h <= m_s && !powered(m_h)? {
        m_h += 1;
    }
    if m_h == 0 {
        return Ok(None);
    }
    Ok(Some((m_s + 1).saturating_sub(m_h).max(1)))
}

/// Problem-A allocation from [`closed_form_istop`]; requires an equal-gain TX link.
pub fn closed_form_a(channels: &ChannelRealization, spec: &ProblemSpec, harvester: &HarvesterModel) -> Result<PolicyOutcome> {
    if spec.kind != ProblemKind::ProblemA {
        return Err(Error::domain("the closed form solves Problem A only"));
    }
    let m_s = check_cells(channels)?;
    if !channels.tx_equal_gain() {
        return Err(Error::domain("the closed form requires identical TX-link magnitudes"));
    }
    let beta = channels.mag_t(0).powi(2);
    let i_stop = closed_form_istop(beta, spec, harvester, m_s)?;
    let kept = i_stop.map_or(m_s, |i| i - 1);
    let order = descending_order(|k| channels.mag_r(k), m_s);
    let allocation = Allocation::from_reflecting(m_s, &order[..kept])?;
    PolicyOutcome::evaluate(PolicyId::ClosedFormA, allocation, i_stop, channels, spec, harvester)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::policies::solve_problem_a;

    fn harvester() -> HarvesterModel {
        HarvesterModel::new(120.0, 1e-3, 20e-3, 0.5).unwrap()
    }

    #[test]
    fn zero_consumption_never_stops() {
        let spec = ProblemSpec::problem_a(0.0, 1.0, 4e-11).unwrap();
        assert_eq!(closed_form_istop(7.1e-5, &spec, &harvester(), 10).unwrap(), None);
    }

    #[test]
    fn huge_gain_needs_one_cell() {
        let spec = ProblemSpec::problem_a(100e-6, 1.0, 4e-11).unwrap();
        assert_eq!(closed_form_istop(1e3, &spec, &harvester(), 10).unwrap(), Some(10));
    }

    #[test]
    fn saturation_is_infeasible() {
        let spec = ProblemSpec::problem_a(20e-3, 1.0, 4e-11).unwrap();
        assert!(matches!(closed_form_istop(1.0, &spec, &harvester(), 10), Err(Error::Infeasible(_))));
    }

    #[test]
    fn starved_harvester_stops_immediately() {
        let spec = ProblemSpec::problem_a(100e-6, 1.0, 4e-11).unwrap();
        assert_eq!(closed_form_istop(0.0, &spec, &harvester(), 10).unwrap(), Some(1));
        assert_eq!(closed_form_istop(1e-9, &spec, &harvester(), 10).unwrap(), Some(1));
    }

    #[test]
    fn table_parameters_match_loop() {
        let beta: f64 = 7.10e-5;
        let spec = ProblemSpec::problem_a(100e-6, 1.0, 4e-11).unwrap();
        let rx: Vec<f64> = (0..10).map(|k| 1e-3 * (1.0 + 0.1 * k as f64)).collect();
        let ch = ChannelRealization::from_magnitudes(&[beta.sqrt(); 10], &rx).unwrap();
        let h = harvester();
        let loop_stop = solve_problem_a(PolicyId::A1, &ch, &spec, &h).unwrap().i_stop;
        let closed = closed_form_istop(ch.mag_t(0).powi(2), &spec, &h, 10).unwrap();
        assert_eq!(closed, loop_stop);
        // 8.86e-5 W of RF input at 3.55e-5 W per cell needs three cells.
        assert_eq!(closed, Some(8));
        let out = closed_form_a(&ch, &spec, &h).unwrap();
        assert_eq!(out.allocation.m_h(), 3);
        assert!(out.feasible);
    }

    #[test]
    fn boundary_sweep_matches_loop() {
        let h = harvester();
        let beta: f64 = 7.10e-5;
        let ch = ChannelRealization::from_magnitudes(&[beta.sqrt(); 8], &[0.8, 0.1, 0.5, 0.3, 0.9, 0.2, 0.4, 0.6]).unwrap();
        let b = ch.mag_t(0).powi(2);
        for n in 0..=8usize {
            let mut sum = 0.0;
            for _ in 0..n {
                sum += b;
            }
            let at = rectifier_dc_power(h.eta_rf * sum, &h).unwrap();
            for p in [at * (1.0 - 1e-15), at, at * (1.0 + 1e-15), at * 1.3] {
                if p <= 0.0 {
                    continue;
                }
                let spec = ProblemSpec::problem_a(p, 1.0, 4e-11).unwrap();
                let lp = solve_problem_a(PolicyId::A1, &ch, &spec, &h).unwrap().i_stop;
                assert_eq!(closed_form_istop(b, &spec, &h, 8).unwrap(), lp, "n={n} p={p:e}");
            }
        }
    }

    #[test]
    fn unequal_tx_rejected() {
        let ch = ChannelRealization::from_magnitudes(&[0.1, 0.2], &[0.1, 0.1]).unwrap();
        let spec = ProblemSpec::problem_a(1e-6, 1.0, 4e-11).unwrap();
        assert!(closed_form_a(&ch, &spec, &harvester()).is_err());
    }
}
