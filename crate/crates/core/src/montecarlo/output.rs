//! CSV and JSON writers for experiment results. Floats use Rust's
//! shortest round-trip formatting, which is locale independent.

use std::io::Write;

use serde::{Deserialize, Serialize};

use super::stats::{empirical_cdf, pmf_of_mh, EmpiricalDistribution};
use super::{ExperimentResult, PolicyResult};
use crate::error::Result;
use crate::policies::{PolicyId, ProblemKind};
use crate::units::{to_db, watts_to_dbm};

fn num(x: f64) -> String {
    format!("{x:?}")
}

fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

/// `trial,policy_id,objective_linear,objective_db,m_h,feasible`, trial-major.
pub fn write_samples_csv<W: Write>(result: &ExperimentResult, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["trial", "policy_id", "objective_linear", "objective_db", "m_h", "feasible"])?;
    for t in 0..result.trials {
        for p in &result.policies {
            let v = p.objective[t];
            w.write_record([
                t.to_string(),
                p.policy.name().to_string(),
                num(v),
                num(to_db(v)),
                p.m_h[t].to_string(),
                p.feasible[t].to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// `policy_id,x_db,F`: one row per sorted sample, `F` right-continuous.
pub fn write_cdf_csv<W: Write>(result: &ExperimentResult, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["policy_id", "x_db", "F"])?;
    for p in &result.policies {
        let d = EmpiricalDistribution::new(p.objective.clone())?;
        for &x in d.samples() {
            w.write_record([p.policy.name().to_string(), num(to_db(x)), num(empirical_cdf(&d, x))])?;
        }
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolicySummary {
    pub policy_id: String,
    pub trials: usize,
    /// Arithmetic mean of the linear objective (SNR or W).
    pub mean_linear: f64,
    /// dB of `mean_linear` (dBW for Problem B); null when the mean is zero.
    pub mean_db: Option<f64>,
    /// Mean of the per-trial dB values over strictly positive samples.
    pub mean_of_db: Option<f64>,
    pub positive_samples: usize,
    /// Problem B only.
    pub mean_watts: Option<f64>,
    pub mean_dbm: Option<f64>,
    pub feasibility_rate: f64,
    /// Probability of each harvesting-cell count `0..=M_s`.
    pub pmf_m_h: Vec<f64>,
    /// Problem A: `mean_db` of the exhaustive search minus this policy's.
    pub gap_to_brute_force_db: Option<f64>,
    /// Problem B: mean DC power over that of the exhaustive search.
    pub ratio_to_brute_force: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub problem: String,
    pub trials: usize,
    pub m_s: usize,
    pub policies: Vec<PolicySummary>,
}

fn summarize_policy(r: &PolicyResult, kind: ProblemKind, m_s: usize, reference: Option<&PolicyResult>) -> Result<PolicySummary> {
    let mean = r.mean_objective();
    let positive: Vec<f64> = r.objective.iter().copied().filter(|&v| v > 0.0).collect();
    let mean_of_db = (!positive.is_empty()).then(|| positive.iter().map(|&v| to_db(v)).sum::<f64>() / positive.len() as f64);
    let (gap, ratio) = match (reference, kind) {
        (Some(bf), ProblemKind::ProblemA) => (finite(to_db(bf.mean_objective()) - to_db(mean)), None),
        (Some(bf), ProblemKind::ProblemB) => (None, finite(mean / bf.mean_objective())),
        (None, _) => (None, None),
    };
    let watts = kind == ProblemKind::ProblemB;
    Ok(PolicySummary {
        policy_id: r.policy.name().to_string(),
        trials: r.objective.len(),
        mean_linear: mean,
        mean_db: finite(to_db(mean)),
        mean_of_db,
        positive_samples: positive.len(),
        mean_watts: watts.then_some(mean),
        mean_dbm: if watts { finite(watts_to_dbm(mean)) } else { None },
        feasibility_rate: r.feasibility_rate(),
        pmf_m_h: pmf_of_mh(&r.m_h, m_s)?,
        gap_to_brute_force_db: gap,
        ratio_to_brute_force: ratio,
    })
}

pub fn summarize(result: &ExperimentResult) -> Result<Summary> {
    let bf_id = match result.kind {
        ProblemKind::ProblemA => PolicyId::BruteForceA,
        ProblemKind::ProblemB => PolicyId::BruteForceB,
    };
    let reference = result.get(bf_id);
    let policies = result
        .policies
        .iter()
        .map(|p| summarize_policy(p, result.kind, result.m_s, reference))
        .collect::<Result<_>>()?;
    Ok(Summary {
        problem: result.kind.to_string(),
        trials: result.trials,
        m_s: result.m_s,
        policies,
    })
}

pub fn write_summary_json<W: Write>(summary: &Summary, mut out: W) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, summary).map_err(|e| crate::error::Error::Io(e.to_string()))?;
    out.write_all(b"\n")?;
    Ok(())
}
