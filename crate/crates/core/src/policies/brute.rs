//! Exhaustive search over every allocation with nonempty `A_h` and `A_r`.
//!
//! Masks are visited in Gray-code order so each step flips one cell and the
//! running sums update in O(1). The index range is cut into fixed-size
//! chunks that restart from freshly computed sums; chunks may run on any
//! number of workers and are merged with a total order, so the answer does
//! not depend on the thread count. Candidates close to the incumbent are
//! re-evaluated from scratch before any comparison, and the constraint is
//! checked exactly whenever the running sum lies near its boundary.

use std::cmp::Ordering;

use rayon::prelude::*;

use super::{check_cells, Allocation, PolicyId, PolicyOutcome, ProblemKind, ProblemSpec};
use crate::channel::ChannelRealization;
use crate::energy::{dc_power, harvest_gain_sum, required_rf_input, HarvesterModel};
use crate::error::{Error, Result};
use crate::link::{coherent_amplitude, max_snr};

pub const DEFAULT_CAP: usize = 22;

/// Largest cell count a mask can represent.
const MASK_BITS: usize = 62;
/// Relative band around the constraint boundary inside which the running
/// sum is not trusted.
const BOUNDARY_MARGIN: f64 = 1e-9;
/// Relative band below the incumbent within which candidates are re-evaluated.
const TIE_MARGIN: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BruteForceOptions {
    /// Refuse surfaces with more cells than this.
    pub cap: usize,
    /// Masks per chunk; fixed so results are independent of parallelism.
    pub chunk_size: u64,
    pub parallel: bool,
}

impl Default for BruteForceOptions {
    fn default() -> Self {
        Self {
            cap: DEFAULT_CAP,
            chunk_size: 1 << 12,
            parallel: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BruteForceResult {
    pub outcome: PolicyOutcome,
    /// Number of allocations examined, `2^M_s - 2`.
    pub enumerated: u64,
}

/// `2^M_s - 2`, the number of allocations with both sets nonempty.
pub fn combination_count(m_s: usize) -> u128 {
    if m_s >= 128 {
        return u128::MAX;
    }
    (1u128 << m_s).saturating_sub(2)
}

pub fn brute_force_a(channels: &ChannelRealization, spec: &ProblemSpec, harvester: &HarvesterModel) -> Result<PolicyOutcome> {
    expect_kind(spec, ProblemKind::ProblemA)?;
    Ok(brute_force(channels, spec, harvester, &BruteForceOptions::default())?.outcome)
}

pub fn brute_force_b(channels: &ChannelRealization, spec: &ProblemSpec, harvester: &HarvesterModel) -> Result<PolicyOutcome> {
    expect_kind(spec, ProblemKind::ProblemB)?;
    Ok(brute_force(channels, spec, harvester, &BruteForceOptions::default())?.outcome)
}

fn expect_kind(spec: &ProblemSpec, kind: ProblemKind) -> Result<()> {
    if spec.kind != kind {
        return Err(Error::domain(format!("problem spec is of kind {}, expected {kind}", spec.kind)));
    }
    Ok(())
}

/// Problem A maximizes SNR with ties going to the lexicographically smallest
/// `A_r`; Problem B maximizes `sum_{A_h} |h_t|^2` with ties going to the
/// lexicographically smallest `A_h`.
pub fn brute_force(
    channels: &ChannelRealization,
    spec: &ProblemSpec,
    harvester: &HarvesterModel,
    options: &BruteForceOptions,
) -> Result<BruteForceResult> {
    spec.validate()?;
    let m_s = check_cells(channels)?;
    let cap = options.cap.min(MASK_BITS);
    if m_s > cap {
        return Err(Error::BruteForceCap {
            cells: m_s,
            cap: options.cap,
            combinations: combination_count(m_s),
        });
    }
    if options.chunk_size == 0 {
        return Err(Error::domain("chunk size must be positive"));
    }
    let search = Search::new(channels, spec, harvester)?;
    let total: u64 = 1 << m_s;
    let chunks = total.div_ceil(options.chunk_size);
    let run = |c: u64| -> Result<Option<Best>> {
        let lo = (c * options.chunk_size).max(1);
        let hi = ((c + 1) * options.chunk_size).min(total);
        search.chunk(lo, hi)
    };
    let partial: Vec<Option<Best>> = if options.parallel && chunks > 1 {
        (0..chunks).into_par_iter().map(run).collect::<Result<_>>()?
    } else {
        (0..chunks).map(run).collect::<Result<_>>()?
    };
    let mut best: Option<Best> = None;
    for b in partial.into_iter().flatten() {
        best = Some(match best {
            Some(cur) if search.compare(&b, &cur) != Ordering::Greater => cur,
            _ => b,
        });
    }

    let policy = match spec.kind {
        ProblemKind::ProblemA => PolicyId::BruteForceA,
        ProblemKind::ProblemB => PolicyId::BruteForceB,
    };
    let allocation = match (best, spec.kind) {
        (Some(b), _) => search.allocation(b.mask),
        (None, ProblemKind::ProblemA) => Allocation::from_reflecting(m_s, &[])?,
        (None, ProblemKind::ProblemB) => Allocation::from_harvesting(m_s, &[])?,
    };
    let mut outcome = PolicyOutcome::evaluate(policy, allocation, None, channels, spec, harvester)?;
    // The fallback sets lie outside the enumerated range even when they
    // happen to meet the constraint.
    outcome.feasible &= best.is_some();
    Ok(BruteForceResult {
        outcome,
        enumerated: (total - 2),
    })
}

#[derive(Debug, Clone, Copy)]
struct Best {
    /// Objective recomputed from the sorted index sets.
    value: f64,
    /// Bit `k` set when cell `k` reflects.
    mask: u64,
}

struct Search<'a> {
    channels: &'a ChannelRealization,
    spec: &'a ProblemSpec,
    harvester: &'a HarvesterModel,
    m_s: usize,
    full: u64,
    prod: Vec<f64>,
    ht2: Vec<f64>,
    /// Problem A: RF input the rectifier needs, or `None` when the
    /// consumption is beyond saturation. Problem B: `sqrt(gamma_0 sigma^2 / P_t)`.
    threshold: Option<f64>,
}

#[inline]
fn gray(i: u64) -> u64 {
    i ^ (i >> 1)
}

impl<'a> Search<'a> {
    fn new(channels: &'a ChannelRealization, spec: &'a ProblemSpec, harvester: &'a HarvesterModel) -> Result<Self> {
        let m_s = channels.num_cells();
        let threshold = match spec.kind {
            ProblemKind::ProblemA => match required_rf_input(spec.p_ris, harvester) {
                Ok(x) => Some(x),
                Err(Error::Infeasible(_)) => None,
                Err(e) => return Err(e),
            },
            ProblemKind::ProblemB => Some((spec.gamma_0 * spec.sigma_sq / spec.p_t).sqrt()),
        };
        Ok(Self {
            channels,
            spec,
            harvester,
            m_s,
            full: (1u64 << m_s) - 1,
            prod: (0..m_s).map(|k| channels.product_gain(k)).collect(),
            ht2: (0..m_s).map(|k| channels.mag_t(k).powi(2)).collect(),
            threshold,
        })
    }

    fn reflecting(&self, mask: u64) -> Vec<usize> {
        (0..self.m_s).filter(|&k| mask >> k & 1 == 1).collect()
    }

    fn harvesting(&self, mask: u64) -> Vec<usize> {
        (0..self.m_s).filter(|&k| mask >> k & 1 == 0).collect()
    }

    fn allocation(&self, mask: u64) -> Allocation {
        let flags: Vec<bool> = (0..self.m_s).map(|k| mask >> k & 1 == 1).collect();
        Allocation::from_flags(&flags)
    }

    fn fresh_sums(&self, mask: u64) -> (f64, f64) {
        let (mut amp, mut harv) = (0.0, 0.0);
        for k in 0..self.m_s {
            if mask >> k & 1 == 1 {
                amp += self.prod[k];
            } else {
                harv += self.ht2[k];
            }
        }
        (amp, harv)
    }

    fn feasible(&self, mask: u64, amp: f64, harv: f64) -> Result<bool> {
        let Some(thr) = self.threshold else { return Ok(false) };
        let running = match self.spec.kind {
            ProblemKind::ProblemA => self.harvester.eta_rf * self.spec.p_t * harv,
            ProblemKind::ProblemB => amp,
        };
        if running > thr * (1.0 + BOUNDARY_MARGIN) {
            return Ok(true);
        }
        if running < thr * (1.0 - BOUNDARY_MARGIN) {
            return Ok(false);
        }
        Ok(match self.spec.kind {
            ProblemKind::ProblemA => dc_power(self.channels, &self.harvesting(mask), self.spec.p_t, self.harvester)? >= self.spec.p_ris,
            ProblemKind::ProblemB => {
                max_snr(self.channels, &self.reflecting(mask), self.spec.p_t, self.spec.sigma_sq)? >= self.spec.gamma_0
            }
        })
    }

    fn fresh_value(&self, mask: u64) -> Result<f64> {
        match self.spec.kind {
            ProblemKind::ProblemA => coherent_amplitude(self.channels, &self.reflecting(mask)),
            ProblemKind::ProblemB => harvest_gain_sum(self.channels, &self.harvesting(mask)),
        }
    }

    /// `Greater` when `a` beats `b`.
    fn compare(&self, a: &Best, b: &Best) -> Ordering {
        a.value.total_cmp(&b.value).then_with(|| {
            let (sa, sb) = match self.spec.kind {
                ProblemKind::ProblemA => (self.reflecting(a.mask), self.reflecting(b.mask)),
                ProblemKind::ProblemB => (self.harvesting(a.mask), self.harvesting(b.mask)),
            };
            sb.cmp(&sa)
        })
    }

    fn chunk(&self, lo: u64, hi: u64) -> Result<Option<Best>> {
        let mut mask = gray(lo);
        let (mut amp, mut harv) = self.fresh_sums(mask);
        let mut best: Option<Best> = None;
        for i in lo..hi {
            if i > lo {
                let bit = i.trailing_zeros() as usize;
                mask ^= 1 << bit;
                if mask >> bit & 1 == 1 {
                    amp += self.prod[bit];
                    harv -= self.ht2[bit];
                } else {
                    amp -= self.prod[bit];
                    harv += self.ht2[bit];
                }
            }
            if mask == self.full || !self.feasible(mask, amp, harv)? {
                continue;
            }
            let running = match self.spec.kind {
                ProblemKind::ProblemA => amp,
                ProblemKind::ProblemB => harv,
            };
            if let Some(b) = &best {
                if running < b.value * (1.0 - TIE_MARGIN) {
                    continue;
                }
            }
            let cand = Best {
                value: self.fresh_value(mask)?,
                mask,
            };
            best = Some(match best {
                Some(b) if self.compare(&cand, &b) != Ordering::Greater => b,
                _ => cand,
            });
        }
        Ok(best)
    }
}
