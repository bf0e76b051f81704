//! The eight ordering heuristics. Every constraint check recomputes the
//! metric from the sorted index sets, so outcomes agree bit for bit with the
//! exhaustive search whenever both pick the same sets.

use super::{check_cells, descending_order, Allocation, PolicyId, PolicyOutcome, ProblemKind, ProblemSpec};
use crate::channel::ChannelRealization;
use crate::energy::{dc_power, HarvesterModel};
use crate::error::{Error, Result};
use crate::link::max_snr;

#[derive(Clone, Copy)]
enum Key {
    Rx,
    Tx,
    Product,
}

fn order(channels: &ChannelRealization, key: Key) -> Vec<usize> {
    let m_s = channels.num_cells();
    match key {
        Key::Rx => descending_order(|k| channels.mag_r(k), m_s),
        Key::Tx => descending_order(|k| channels.mag_t(k), m_s),
        Key::Product => descending_order(|k| channels.product_gain(k), m_s),
    }
}

/// Splits `order` into its first `n` entries and the rest, both sorted.
fn split(order: &[usize], n: usize) -> (Vec<usize>, Vec<usize>) {
    let mut head = order[..n].to_vec();
    let mut tail = order[n..].to_vec();
    head.sort_unstable();
    tail.sort_unstable();
    (head, tail)
}

fn check_kind(spec: &ProblemSpec, kind: ProblemKind) -> Result<()> {
    spec.validate()?;
    if spec.kind != kind {
        return Err(Error::domain(format!("problem spec is of kind {}, expected {kind}", spec.kind)));
    }
    Ok(())
}

/// Algorithms A.1 to A.4.
///
/// A.1 to A.3 grow the reflecting set along the descending order of `|h_r|`,
/// `|h_t||h_r|` and `|h_t|` respectively, stopping at the first size whose
/// complement cannot power the RIS and keeping the previous size. A.4 grows
/// the harvesting set along descending `|h_t|` until the rectifier covers the
/// consumption.
pub fn solve_problem_a(
    policy: PolicyId,
    channels: &ChannelRealization,
    spec: &ProblemSpec,
    harvester: &HarvesterModel,
) -> Result<PolicyOutcome> {
    check_kind(spec, ProblemKind::ProblemA)?;
    let m_s = check_cells(channels)?;
    let powered = |a_h: &[usize]| -> Result<bool> { Ok(dc_power(channels, a_h, spec.p_t, harvester)? >= spec.p_ris) };

    let (reflecting, i_stop) = match policy {
        PolicyId::A1 | PolicyId::A2 | PolicyId::A3 => {
            let key = match policy {
                PolicyId::A1 => Key::Rx,
                PolicyId::A2 => Key::Product,
                _ => Key::Tx,
            };
            let ord = order(channels, key);
            let mut stop = None;
            for i in 1..=m_s {
                let (_, a_h) = split(&ord, i);
                if !powered(&a_h)? {
                    stop = Some(i);
                    break;
                }
            }
            let kept = stop.map_or(m_s, |i| i - 1);
            (ord[..kept].to_vec(), stop)
        }
        PolicyId::A4 => {
            let ord = order(channels, Key::Tx);
            let mut stop = None;
            for i in 0..m_s {
                let (a_h, _) = split(&ord, i);
                if powered(&a_h)? {
                    stop = Some(i);
                    break;
                }
            }
            match stop {
                Some(i) => (ord[i..].to_vec(), stop),
                None => (Vec::new(), None),
            }
        }
        other => return Err(Error::domain(format!("{other} is not a Problem-A heuristic"))),
    };
    let allocation = Allocation::from_reflecting(m_s, &reflecting)?;
    PolicyOutcome::evaluate(policy, allocation, i_stop, channels, spec, harvester)
}

/// Algorithms B.1 to B.4.
///
/// B.1 grows the harvesting set along descending `|h_t|` until the SNR floor
/// breaks and keeps the previous size. B.2 to B.4 grow the reflecting set
/// along descending `|h_r|`, `|h_t||h_r|` and `|h_t|` until the floor is met.
pub fn solve_problem_b(
    policy: PolicyId,
    channels: &ChannelRealization,
    spec: &ProblemSpec,
    harvester: &HarvesterModel,
) -> Result<PolicyOutcome> {
    check_kind(spec, ProblemKind::ProblemB)?;
    let m_s = check_cells(channels)?;
    let served = |a_r: &[usize]| -> Result<bool> { Ok(max_snr(channels, a_r, spec.p_t, spec.sigma_sq)? >= spec.gamma_0) };

    let allocation_and_stop = match policy {
        PolicyId::B1 => {
            let ord = order(channels, Key::Tx);
            let mut stop = None;
            for i in 1..=m_s {
                let (_, a_r) = split(&ord, i);
                if !served(&a_r)? {
                    stop = Some(i);
                    break;
                }
            }
            let kept = stop.map_or(m_s, |i| i - 1);
            (Allocation::from_harvesting(m_s, &ord[..kept])?, stop)
        }
        PolicyId::B2 | PolicyId::B3 | PolicyId::B4 => {
            let key = match policy {
                PolicyId::B2 => Key::Rx,
                PolicyId::B3 => Key::Product,
                _ => Key::Tx,
            };
            let ord = order(channels, key);
            let mut stop = None;
            for i in 1..=m_s {
                let (a_r, _) = split(&ord, i);
                if served(&a_r)? {
                    stop = Some(i);
                    break;
                }
            }
            let kept = stop.unwrap_or(m_s);
            (Allocation::from_reflecting(m_s, &ord[..kept])?, stop)
        }
        other => return Err(Error::domain(format!("{other} is not a Problem-B heuristic"))),
    };
    let (allocation, i_stop) = allocation_and_stop;
    PolicyOutcome::evaluate(policy, allocation, i_stop, channels, spec, harvester)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::energy::harvested_rf_power;

    fn harvester() -> HarvesterModel {
        HarvesterModel::new(120.0, 1e-3, 20e-3, 0.5).unwrap()
    }

    fn channels() -> ChannelRealization {
        ChannelRealization::from_magnitudes(
            &[0.010, 0.008, 0.012, 0.009, 0.011, 0.007],
            &[0.003, 0.006, 0.001, 0.005, 0.002, 0.004],
        )
        .unwrap()
    }

    #[test]
    fn a1_reflects_best_rx_cells() {
        let ch = channels();
        let h = harvester();
        // two weakest-rx cells must harvest: order by |h_r| is 1,3,5,0,4,2
        let need = crate::energy::dc_power(&ch, &[2, 4], 1.0, &h).unwrap();
        let spec = ProblemSpec::problem_a(need, 1.0, 1e-11).unwrap();
        let out = solve_problem_a(PolicyId::A1, &ch, &spec, &h).unwrap();
        assert_eq!(out.allocation.a_r, vec![0, 1, 3, 5]);
        assert_eq!(out.allocation.a_h, vec![2, 4]);
        assert_eq!(out.i_stop, Some(5));
        assert!(out.feasible);
        assert!(out.p_dc >= spec.p_ris);
    }

    #[test]
    fn a_vacuous_reflects_all() {
        let ch = channels();
        let spec = ProblemSpec::problem_a(0.0, 1.0, 1e-11).unwrap();
        for p in [PolicyId::A1, PolicyId::A2, PolicyId::A3] {
            let out = solve_problem_a(p, &ch, &spec, &harvester()).unwrap();
            assert_eq!(out.allocation.m_r(), 6);
            assert_eq!(out.i_stop, None);
            assert!(out.feasible);
        }
        let out = solve_problem_a(PolicyId::A4, &ch, &spec, &harvester()).unwrap();
        assert_eq!(out.allocation.m_h(), 0);
        assert_eq!(out.i_stop, Some(0));
    }

    #[test]
    fn a_infeasible_signals() {
        let ch = channels();
        let spec = ProblemSpec::problem_a(1e-3, 1.0, 1e-11).unwrap();
        for p in [PolicyId::A1, PolicyId::A2, PolicyId::A3, PolicyId::A4] {
            let out = solve_problem_a(p, &ch, &spec, &harvester()).unwrap();
            assert!(!out.feasible, "{p}");
            assert!(out.allocation.a_r.is_empty());
            assert_eq!(out.allocation.m_h(), 6);
        }
    }

    #[test]
    fn a4_grows_harvest_until_powered() {
        let ch = channels();
        let h = harvester();
        // |h_t| order: 2,4,0,3,1,5
        let need = crate::energy::dc_power(&ch, &[2, 4, 0], 1.0, &h).unwrap();
        let spec = ProblemSpec::problem_a(need, 1.0, 1e-11).unwrap();
        let out = solve_problem_a(PolicyId::A4, &ch, &spec, &h).unwrap();
        assert_eq!(out.allocation.a_h, vec![0, 2, 4]);
        assert_eq!(out.i_stop, Some(3));
        assert!(out.feasible);
    }

    #[test]
    fn b2_minimal_reflection() {
        let ch = channels();
        let spec = ProblemSpec::problem_b(0.0, 1.0, 1e-11).unwrap();
        let out = solve_problem_b(PolicyId::B2, &ch, &spec, &harvester()).unwrap();
        assert_eq!(out.allocation.a_r, vec![1]);
        assert_eq!(out.i_stop, Some(1));
        let b1 = solve_problem_b(PolicyId::B1, &ch, &spec, &harvester()).unwrap();
        assert_eq!(b1.allocation.m_h(), 6);
        assert_eq!(b1.i_stop, None);
    }

    #[test]
    fn b_threshold_met() {
        let ch = channels();
        let floor = max_snr(&ch, &[1, 3, 5], 1.0, 1e-11).unwrap();
        let spec = ProblemSpec::problem_b(floor, 1.0, 1e-11).unwrap();
        let out = solve_problem_b(PolicyId::B2, &ch, &spec, &harvester()).unwrap();
        assert_eq!(out.allocation.a_r, vec![1, 3, 5]);
        assert!(out.feasible && out.snr >= floor);
        let b1 = solve_problem_b(PolicyId::B1, &ch, &spec, &harvester()).unwrap();
        assert!(b1.feasible && b1.snr >= floor);
        assert!(b1.allocation.is_partition_of(6));
    }

    #[test]
    fn b_infeasible_signals() {
        let ch = channels();
        let spec = ProblemSpec::problem_b(1e30, 1.0, 1e-11).unwrap();
        for p in [PolicyId::B1, PolicyId::B2, PolicyId::B3, PolicyId::B4] {
            let out = solve_problem_b(p, &ch, &spec, &harvester()).unwrap();
            assert!(!out.feasible);
            assert!(out.allocation.a_h.is_empty(), "{p}");
        }
    }

    #[test]
    fn wrong_inputs() {
        let one = ChannelRealization::from_magnitudes(&[0.1], &[0.1]).unwrap();
        let a = ProblemSpec::problem_a(1e-6, 1.0, 1e-11).unwrap();
        let b = ProblemSpec::problem_b(1.0, 1.0, 1e-11).unwrap();
        assert!(solve_problem_a(PolicyId::A1, &one, &a, &harvester()).is_err());
        assert!(solve_problem_a(PolicyId::A1, &channels(), &b, &harvester()).is_err());
        assert!(solve_problem_a(PolicyId::B1, &channels(), &a, &harvester()).is_err());
        assert!(solve_problem_b(PolicyId::A1, &channels(), &b, &harvester()).is_err());
    }

    #[test]
    fn harvest_non_increasing_along_a1_loop() {
        let ch = channels();
        let ord = order(&ch, Key::Rx);
        let mut prev = f64::INFINITY;
        for i in 1..=6 {
            let (_, a_h) = split(&ord, i);
            let p = harvested_rf_power(&ch, &a_h, 1.0, &harvester()).unwrap();
            assert!(p <= prev);
            prev = p;
        }
    }
}
