//! Allocation of cells between harvesting and reflection.
//!
//! Problem A maximizes the SNR subject to the rectifier covering the RIS
//! consumption; Problem B maximizes the DC output subject to an SNR floor.

mod brute;
mod closed_form;
mod greedy;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::channel::ChannelRealization;
use crate::energy::{dc_power, HarvesterModel};
use crate::error::{Error, Result};
use crate::link::max_snr;
use crate::units::to_db;

pub use brute::{brute_force, brute_force_a, brute_force_b, combination_count, BruteForceOptions, BruteForceResult, DEFAULT_CAP};
pub use closed_form::{closed_form_a, closed_form_istop};
pub use greedy::{solve_problem_a, solve_problem_b};

/// Partition of the cells into harvesting and reflecting sets, both sorted.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Allocation {
    pub a_h: Vec<usize>,
    pub a_r: Vec<usize>,
}

impl Allocation {
    /// Builds the partition with `reflecting` as `A_r` and the rest as `A_h`.
    pub fn from_reflecting(m_s: usize, reflecting: &[usize]) -> Result<Self> {
        let mut flags = vec![false; m_s];
        for &k in reflecting {
            if k >= m_s {
                return Err(Error::domain(format!("cell index {k} out of range for {m_s} cells")));
            }
            if flags[k] {
                return Err(Error::domain(format!("cell index {k} listed twice")));
            }
            flags[k] = true;
        }
        Ok(Self::from_flags(&flags))
    }

    pub fn from_harvesting(m_s: usize, harvesting: &[usize]) -> Result<Self> {
        let a = Self::from_reflecting(m_s, harvesting)?;
        Ok(Self { a_h: a.a_r, a_r: a.a_h })
    }

    /// `reflecting[k]` marks cell `k` as a member of `A_r`.
    pub fn from_flags(reflecting: &[bool]) -> Self {
        let (mut a_h, mut a_r) = (Vec::new(), Vec::new());
        for (k, &r) in reflecting.iter().enumerate() {
            if r {
                a_r.push(k);
            } else {
                a_h.push(k);
            }
        }
        Self { a_h, a_r }
    }

    pub fn num_cells(&self) -> usize {
        self.a_h.len() + self.a_r.len()
    }

    pub fn m_h(&self) -> usize {
        self.a_h.len()
    }

    pub fn m_r(&self) -> usize {
        self.a_r.len()
    }

    /// True when the two sets are sorted, disjoint and cover `0..m_s`.
    pub fn is_partition_of(&self, m_s: usize) -> bool {
        let sorted = |v: &[usize]| v.windows(2).all(|w| w[0] < w[1]);
        if !sorted(&self.a_h) || !sorted(&self.a_r) || self.num_cells() != m_s {
            return false;
        }
        let mut seen = vec![false; m_s];
        for &k in self.a_h.iter().chain(&self.a_r) {
            if k >= m_s || seen[k] {
                return false;
            }
            seen[k] = true;
        }
        true
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ProblemKind {
    /// Maximize SNR subject to `P_DC >= P_RIS`.
    ProblemA,
    /// Maximize `P_DC` subject to `SNR >= gamma_0`.
    ProblemB,
}

impl fmt::Display for ProblemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ProblemKind::ProblemA => "A",
            ProblemKind::ProblemB => "B",
        })
    }
}

impl FromStr for ProblemKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "a" | "problema" | "problem-a" => Ok(ProblemKind::ProblemA),
            "b" | "problemb" | "problem-b" => Ok(ProblemKind::ProblemB),
            other => Err(Error::Parse(format!("unknown problem kind '{other}', expected A or B"))),
        }
    }
}

/// Constraint and link budget of one optimization problem. Only the
/// constraint matching `kind` is consulted.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProblemSpec {
    pub kind: ProblemKind,
    /// DC power the harvester must deliver, W.
    pub p_ris: f64,
    /// Linear SNR floor.
    pub gamma_0: f64,
    /// Transmit power, W.
    pub p_t: f64,
    /// Noise power, W.
    pub sigma_sq: f64,
}

impl ProblemSpec {
    pub fn new(kind: ProblemKind, p_ris: f64, gamma_0: f64, p_t: f64, sigma_sq: f64) -> Result<Self> {
        let s = Self {
            kind,
            p_ris,
            gamma_0,
            p_t,
            sigma_sq,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn problem_a(p_ris: f64, p_t: f64, sigma_sq: f64) -> Result<Self> {
        Self::new(ProblemKind::ProblemA, p_ris, 0.0, p_t, sigma_sq)
    }

    pub fn problem_b(gamma_0: f64, p_t: f64, sigma_sq: f64) -> Result<Self> {
        Self::new(ProblemKind::ProblemB, 0.0, gamma_0, p_t, sigma_sq)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.p_ris >= 0.0) || !(self.gamma_0 >= 0.0) {
            return Err(Error::domain("constraints must be non-negative"));
        }
        if !(self.p_t > 0.0) || !self.p_t.is_finite() {
            return Err(Error::domain("transmit power must be positive and finite"));
        }
        if !(self.sigma_sq > 0.0) || !self.sigma_sq.is_finite() {
            return Err(Error::domain("noise power must be positive and finite"));
        }
        Ok(())
    }

    /// Whether an allocation with the given metrics meets this problem's constraint.
    pub fn constraint_holds(&self, snr: f64, p_dc: f64) -> bool {
        match self.kind {
            ProblemKind::ProblemA => p_dc >= self.p_ris,
            ProblemKind::ProblemB => snr >= self.gamma_0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PolicyId {
    A1,
    A2,
    A3,
    A4,
    B1,
    B2,
    B3,
    B4,
    BruteForceA,
    BruteForceB,
    ClosedFormA,
}

impl PolicyId {
    pub const ALL: [PolicyId; 11] = [
        PolicyId::A1,
        PolicyId::A2,
        PolicyId::A3,
        PolicyId::A4,
        PolicyId::B1,
        PolicyId::B2,
        PolicyId::B3,
        PolicyId::B4,
        PolicyId::BruteForceA,
        PolicyId::BruteForceB,
        PolicyId::ClosedFormA,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PolicyId::A1 => "A1",
            PolicyId::A2 => "A2",
            PolicyId::A3 => "A3",
            PolicyId::A4 => "A4",
            PolicyId::B1 => "B1",
            PolicyId::B2 => "B2",
            PolicyId::B3 => "B3",
            PolicyId::B4 => "B4",
            PolicyId::BruteForceA => "BruteForceA",
            PolicyId::BruteForceB => "BruteForceB",
            PolicyId::ClosedFormA => "ClosedFormA",
        }
    }

    pub fn kind(self) -> ProblemKind {
        match self {
            PolicyId::A1 | PolicyId::A2 | PolicyId::A3 | PolicyId::A4 | PolicyId::BruteForceA | PolicyId::ClosedFormA => {
                ProblemKind::ProblemA
            }
            _ => ProblemKind::ProblemB,
        }
    }

    pub fn is_brute_force(self) -> bool {
        matches!(self, PolicyId::BruteForceA | PolicyId::BruteForceB)
    }

    pub fn valid_names() -> String {
        Self::ALL.iter().map(|p| p.name()).collect::<Vec<_>>().join(", ")
    }
}

impl fmt::Display for PolicyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PolicyId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key: String = s.trim().chars().filter(|c| !matches!(c, '.' | '-' | '_' | ' ')).collect();
        Self::ALL
            .iter()
            .copied()
            .find(|p| p.name().eq_ignore_ascii_case(&key))
            .ok_or_else(|| Error::Parse(format!("unknown policy '{}'; valid policies: {}", s.trim(), Self::valid_names())))
    }
}

/// Result of running one policy on one realization.
#[derive(Debug, Clone, PartialEq)]
pub struct PolicyOutcome {
    pub allocation: Allocation,
    /// Linear SNR of `A_r` at co-phased reflection.
    pub snr: f64,
    /// Rectifier output of `A_h`, W.
    pub p_dc: f64,
    pub feasible: bool,
    /// Loop index at which a greedy policy stopped; absent for exhaustive
    /// search and when the loop ran to completion without stopping.
    pub i_stop: Option<usize>,
    pub policy_id: PolicyId,
}

impl PolicyOutcome {
    /// Evaluates an allocation from scratch. `feasible` is the constraint
    /// check on the recomputed metrics, and a Problem-A allocation without
    /// reflecting cells is never feasible.
    pub(crate) fn evaluate(
        policy_id: PolicyId,
        allocation: Allocation,
        i_stop: Option<usize>,
        channels: &ChannelRealization,
        spec: &ProblemSpec,
        harvester: &HarvesterModel,
    ) -> Result<Self> {
        let snr = max_snr(channels, &allocation.a_r, spec.p_t, spec.sigma_sq)?;
        let p_dc = dc_power(channels, &allocation.a_h, spec.p_t, harvester)?;
        let mut feasible = spec.constraint_holds(snr, p_dc);
        if spec.kind == ProblemKind::ProblemA && allocation.a_r.is_empty() {
            feasible = false;
        }
        Ok(Self {
            allocation,
            snr,
            p_dc,
            feasible,
            i_stop,
            policy_id,
        })
    }

    /// The per-trial objective: SNR for Problem A, DC power for Problem B.
    pub fn objective(&self) -> f64 {
        match self.policy_id.kind() {
            ProblemKind::ProblemA => self.snr,
            ProblemKind::ProblemB => self.p_dc,
        }
    }

    pub fn record(&self) -> OutcomeRecord {
        let snr_db = to_db(self.snr);
        OutcomeRecord {
            policy_id: self.policy_id.name().to_string(),
            a_h: self.allocation.a_h.clone(),
            a_r: self.allocation.a_r.clone(),
            snr_db: snr_db.is_finite().then_some(snr_db),
            p_dc_watts: self.p_dc,
            feasible: self.feasible,
            i_stop: self.i_stop,
        }
    }
}

/// Serialized form of a [`PolicyOutcome`]. Cell indices are 0-based and
/// `snr_db` is null for an empty reflecting set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutcomeRecord {
    pub policy_id: String,
    pub a_h: Vec<usize>,
    pub a_r: Vec<usize>,
    pub snr_db: Option<f64>,
    pub p_dc_watts: f64,
    pub feasible: bool,
    pub i_stop: Option<usize>,
}

/// Runs any policy with default exhaustive-search options.
pub fn solve(policy: PolicyId, channels: &ChannelRealization, spec: &ProblemSpec, harvester: &HarvesterModel) -> Result<PolicyOutcome> {
    solve_with(policy, channels, spec, harvester, &BruteForceOptions::default())
}

pub fn solve_with(
    policy: PolicyId,
    channels: &ChannelRealization,
    spec: &ProblemSpec,
    harvester: &HarvesterModel,
    options: &BruteForceOptions,
) -> Result<PolicyOutcome> {
    if policy.kind() != spec.kind {
        return Err(Error::domain(format!("policy {policy} does not solve problem {}", spec.kind)));
    }
    match policy {
        PolicyId::A1 | PolicyId::A2 | PolicyId::A3 | PolicyId::A4 => solve_problem_a(policy, channels, spec, harvester),
        PolicyId::B1 | PolicyId::B2 | PolicyId::B3 | PolicyId::B4 => solve_problem_b(policy, channels, spec, harvester),
        PolicyId::BruteForceA | PolicyId::BruteForceB => Ok(brute_force(channels, spec, harvester, options)?.outcome),
        PolicyId::ClosedFormA => closed_form_a(channels, spec, harvester),
    }
}

/// Cell indices ordered by `key` descending, ties by ascending index.
pub(crate) fn descending_order(key: impl Fn(usize) -> f64, m_s: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..m_s).collect();
    idx.sort_by(|&i, &j| key(j).total_cmp(&key(i)));
    idx
}

pub(crate) fn check_cells(channels: &ChannelRealization) -> Result<usize> {
    let m_s = channels.num_cells();
    if m_s < 2 {
        return Err(Error::domain(format!("allocation needs at least two cells, got {m_s}")));
    }
    Ok(m_s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn policy_names_round_trip() {
        for p in PolicyId::ALL {
            assert_eq!(p.name().parse::<PolicyId>().unwrap(), p);
            assert_eq!(p.to_string(), p.name());
        }
        assert_eq!("a.1".parse::<PolicyId>().unwrap(), PolicyId::A1);
        assert_eq!("brute-force-b".parse::<PolicyId>().unwrap(), PolicyId::BruteForceB);
        let err = "A5".parse::<PolicyId>().unwrap_err().to_string();
        assert!(err.contains("ClosedFormA") && err.contains("B4"));
    }

    #[test]
    fn allocation_partition() {
        let a = Allocation::from_reflecting(5, &[3, 0]).unwrap();
        assert_eq!(a.a_r, vec![0, 3]);
        assert_eq!(a.a_h, vec![1, 2, 4]);
        assert!(a.is_partition_of(5));
        assert!(!a.is_partition_of(6));
        assert!(Allocation::from_reflecting(3, &[3]).is_err());
        assert!(Allocation::from_reflecting(3, &[1, 1]).is_err());
        let h = Allocation::from_harvesting(3, &[1]).unwrap();
        assert_eq!((h.a_h, h.a_r), (vec![1], vec![0, 2]));
    }

    #[test]
    fn spec_validation() {
        assert!(ProblemSpec::problem_a(-1.0, 1.0, 1e-11).is_err());
        assert!(ProblemSpec::problem_b(1.0, 0.0, 1e-11).is_err());
        assert!(ProblemSpec::problem_b(1.0, 1.0, 0.0).is_err());
        let s = ProblemSpec::problem_a(1e-4, 1.0, 4e-11).unwrap();
        assert!(s.constraint_holds(0.0, 1e-4));
        assert!(!s.constraint_holds(1e9, 9e-5));
    }

    #[test]
    fn descending_ties_by_index() {
        let keys = [1.0, 3.0, 1.0, 3.0, 2.0];
        assert_eq!(descending_order(|k| keys[k], 5), vec![1, 3, 4, 0, 2]);
    }

    #[test]
    fn record_json_shape() {
        let ch = ChannelRealization::from_magnitudes(&[0.01; 3], &[0.01; 3]).unwrap();
        let spec = ProblemSpec::problem_b(1e30, 1.0, 1e-11).unwrap();
        let h = HarvesterModel::new(120.0, 1e-3, 20e-3, 0.5).unwrap();
        let out = solve(PolicyId::B2, &ch, &spec, &h).unwrap();
        let v: serde_json::Value = serde_json::to_value(out.record()).unwrap();
        for key in ["policy_id", "a_h", "a_r", "snr_db", "p_dc_watts", "feasible", "i_stop"] {
            assert!(v.get(key).is_some(), "{key}");
        }
        assert_eq!(v["feasible"], false);
    }

    #[test]
    fn mismatched_kind_rejected() {
        let ch = ChannelRealization::from_magnitudes(&[0.01; 3], &[0.01; 3]).unwrap();
        let spec = ProblemSpec::problem_b(1.0, 1.0, 1e-11).unwrap();
        let h = HarvesterModel::new(120.0, 1e-3, 20e-3, 0.5).unwrap();
        assert!(solve(PolicyId::A1, &ch, &spec, &h).is_err());
    }
}
