//! Repeated channel draws with every requested policy applied to the same
//! realization in each trial.

mod output;
mod stats;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{derive_seed, draw_channels, FadingParams, Placement, RisGeometry};
use crate::energy::{ris_consumption, HarvesterModel, RisPowerModel};
use crate::error::{Error, Result};
use crate::link::{noise_power, NoiseModel};
use crate::policies::{solve_with, BruteForceOptions, PolicyId, ProblemKind, ProblemSpec};

pub use output::{summarize, write_cdf_csv, write_samples_csv, write_summary_json, PolicySummary, Summary};
pub use stats::{empirical_cdf, mean_db, pmf_of_mh, EmpiricalDistribution};

/// Everything needed to draw a realization and state both problems.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub geometry: RisGeometry,
    pub placement: Placement,
    pub fading: FadingParams,
    pub harvester: HarvesterModel,
    pub power: RisPowerModel,
    pub noise: NoiseModel,
    /// Transmit power, W.
    pub p_t: f64,
}

impl Scenario {
    /// Problem statement implied by the scenario: `P_RIS` from the
    /// consumption model and `sigma^2` from the noise model.
    pub fn problem(&self, kind: ProblemKind, gamma_0: f64) -> Result<ProblemSpec> {
        let p_ris = ris_consumption(&self.power, self.geometry.num_cells())?;
        ProblemSpec::new(kind, p_ris, gamma_0, self.p_t, noise_power(&self.noise))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub trials: usize,
    pub master_seed: u64,
    pub scenario: Scenario,
    pub problem: ProblemSpec,
    pub policies: Vec<PolicyId>,
    pub brute_force: BruteForceOptions,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::domain("at least one trial is required"));
        }
        if self.policies.is_empty() {
            return Err(Error::domain("no policies requested"));
        }
        self.problem.validate()?;
        for p in &self.policies {
            if p.kind() != self.problem.kind {
                return Err(Error::domain(format!("policy {p} does not solve problem {}", self.problem.kind)));
            }
        }
        for (i, p) in self.policies.iter().enumerate() {
            if self.policies[..i].contains(p) {
                return Err(Error::domain(format!("policy {p} requested twice")));
            }
        }
        if self.policies.iter().any(|p| p.is_brute_force()) && self.scenario.geometry.num_cells() > self.brute_force.cap {
            let m_s = self.scenario.geometry.num_cells();
            return Err(Error::BruteForceCap {
                cells: m_s,
                cap: self.brute_force.cap,
                combinations: crate::policies::combination_count(m_s),
            });
        }
        self.scenario.placement.validate()?;
        self.scenario.harvester.validate()?;
        self.scenario.power.validate()?;
        Ok(())
    }
}

/// Per-policy samples in trial order.
#[derive(Debug, Clone, PartialEq)]
pub struct PolicyResult {
    pub policy: PolicyId,
    /// SNR (linear) for Problem A, DC power (W) for Problem B.
    pub objective: Vec<f64>,
    pub m_h: Vec<usize>,
    pub feasible: Vec<bool>,
}

impl PolicyResult {
    pub fn feasibility_rate(&self) -> f64 {
        self.feasible.iter().filter(|&&f| f).count() as f64 / self.feasible.len() as f64
    }

    pub fn mean_objective(&self) -> f64 {
        self.objective.iter().sum::<f64>() / self.objective.len() as f64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentResult {
    pub kind: ProblemKind,
    pub trials: usize,
    pub m_s: usize,
    pub policies: Vec<PolicyResult>,
}

impl ExperimentResult {
    pub fn get(&self, policy: PolicyId) -> Option<&PolicyResult> {
        self.policies.iter().find(|r| r.policy == policy)
    }
}

struct TrialRow {
    objective: f64,
    m_h: usize,
    feasible: bool,
}

/// Runs every trial on the current rayon pool. Trial `t` draws its channels
/// from `derive_seed(master_seed, t)`, and the fold over trials is in index
/// order, so results do not depend on the number of workers.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentResult> {
    config.validate()?;
    let sc = &config.scenario;
    let trial = |t: usize| -> Result<Vec<TrialRow>> {
        let seed = derive_seed(config.master_seed, t as u64);
        let channels = draw_channels(&sc.geometry, &sc.placement, &sc.fading, seed)?;
        config
            .policies
            .iter()
            .map(|&p| {
                let out = solve_with(p, &channels, &config.problem, &sc.harvester, &config.brute_force)?;
                Ok(TrialRow {
                    objective: out.objective(),
                    m_h: out.allocation.m_h(),
                    feasible: out.feasible,
                })
            })
            .collect()
    };
    let rows: Vec<Vec<TrialRow>> = (0..config.trials).into_par_iter().map(trial).collect::<Result<_>>()?;

    let mut policies: Vec<PolicyResult> = config
        .policies
        .iter()
        .map(|&policy| PolicyResult {
            policy,
            objective: Vec::with_capacity(config.trials),
            m_h: Vec::with_capacity(config.trials),
            feasible: Vec::with_capacity(config.trials),
        })
        .collect();
    for row in rows {
        for (res, r) in policies.iter_mut().zip(row) {
            res.objective.push(r.objective);
            res.m_h.push(r.m_h);
            res.feasible.push(r.feasible);
        }
    }
    Ok(ExperimentResult {
        kind: config.problem.kind,
        trials: config.trials,
        m_s: sc.geometry.num_cells(),
        policies,
    })
}
