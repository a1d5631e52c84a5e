//! At-Least-One replication reward.
//!
//! A task replicated onto the set `A` completes if at least one replication
//! returns before the deadline. With per-replication success probabilities
//! `mu_v` and a unit cost `eta` per replication, the expected reward is
//!
//! ```text
//! u(mu, A) = 1 - prod_{v in A} (1 - mu_v) - eta * |A|
//! ```
//!
//! `u` is submodular, and adding candidates in decreasing order of `mu`
//! while the marginal gain stays positive is exactly optimal under a
//! cardinality budget. [`greedy_select`] implements that rule and
//! [`brute_force_select`] is the exhaustive reference it is tested against.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ids::{CandidateId, TaskId};

/// Largest candidate set [`brute_force_select`] will enumerate.
pub const BRUTE_FORCE_LIMIT: usize = 20;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RewardError {
    #[error("unknown candidate {0}")]
    UnknownCandidate(CandidateId),
    #[error("candidate {0} listed more than once")]
    DuplicateCandidate(CandidateId),
    #[error("candidate {0} is already in the base set")]
    CandidateInBase(CandidateId),
    #[error("expected quality {value} of {id} is outside [0, 1]")]
    QualityOutOfRange { id: CandidateId, value: f64 },
    #[error("realized quality must be 0 or 1, got {0}")]
    InvalidRealizedQuality(u8),
    #[error("replication cost eta must lie in [0, 1), got {0}")]
    InvalidEta(f64),
    #[error("budget must be at least 1")]
    ZeroBudget,
    #[error("brute-force enumeration limited to {limit} candidates, got {count}")]
    TooManyCandidates { count: usize, limit: usize },
}

/// Expected replication qualities keyed by candidate.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct QualityVector {
    // sorted by id, ids distinct
    entries: Vec<(CandidateId, f64)>,
}

impl QualityVector {
    pub fn new<I>(entries: I) -> Result<Self, RewardError>
    where
        I: IntoIterator<Item = (CandidateId, f64)>,
    {
        let mut entries: Vec<_> = entries.into_iter().collect();
        for &(id, value) in &entries {
            if !(0.0..=1.0).contains(&value) {
                return Err(RewardError::QualityOutOfRange { id, value });
            }
        }
        entries.sort_by_key(|&(id, _)| id);
        if let Some(w) = entries.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(RewardError::DuplicateCandidate(w[0].0));
        }
        Ok(Self { entries })
    }

    pub fn get(&self, id: CandidateId) -> Option<f64> {
        self.entries
            .binary_search_by_key(&id, |&(c, _)| c)
            .ok()
            .map(|i| self.entries[i].1)
    }

    fn require(&self, id: CandidateId) -> Result<f64, RewardError> {
        self.get(id).ok_or(RewardError::UnknownCandidate(id))
    }

    pub fn ids(&self) -> impl Iterator<Item = CandidateId> + '_ {
        self.entries.iter().map(|&(id, _)| id)
    }

    pub fn iter(&self) -> impl Iterator<Item = (CandidateId, f64)> + '_ {
        self.entries.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Which branch of a policy produced a decision.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Phase {
    Exploration,
    SemiExploration,
    Exploitation,
    Oracle,
    Baseline,
}

impl Phase {
    pub fn as_str(self) -> &'static str {
        match self {
            Phase::Exploration => "exploration",
            Phase::SemiExploration => "semi-exploration",
            Phase::Exploitation => "exploitation",
            Phase::Oracle => "oracle",
            Phase::Baseline => "baseline",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "exploration" => Phase::Exploration,
            "semi-exploration" => Phase::SemiExploration,
            "exploitation" => Phase::Exploitation,
            "oracle" => Phase::Oracle,
            "baseline" => Phase::Baseline,
            _ => return None,
        })
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// The set of replications chosen for one task, in selection order.
#[derive(Clone, Debug, PartialEq)]
pub struct ReplicationDecision {
    pub task_id: TaskId,
    pub selected: Vec<CandidateId>,
    pub phase: Phase,
}

/// Unit replication cost.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RewardParams {
    eta: f64,
}

impl RewardParams {
    pub fn new(eta: f64) -> Result<Self, RewardError> {
        if !(0.0..1.0).contains(&eta) {
            return Err(RewardError::InvalidEta(eta));
        }
        Ok(Self { eta })
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }
}

impl Default for RewardParams {
    fn default() -> Self {
        Self { eta: 0.1 }
    }
}

fn check_distinct(ids: &[CandidateId]) -> Result<(), RewardError> {
    let mut seen = BTreeSet::new();
    for &id in ids {
        if !seen.insert(id) {
            return Err(RewardError::DuplicateCandidate(id));
        }
    }
    Ok(())
}

/// Probability that every replication in `subset` misses the deadline.
fn miss_probability(mu: &QualityVector, subset: &[CandidateId]) -> Result<f64, RewardError> {
    subset
        .iter()
        .try_fold(1.0, |acc, &id| Ok(acc * (1.0 - mu.require(id)?)))
}

/// Reward of a set given the probability that all its members fail.
#[inline]
pub fn reward_from_miss(miss: f64, size: usize, eta: f64) -> f64 {
    (1.0 - miss) - eta * size as f64
}

/// `u(mu, subset)`; the empty set is worth 0.
pub fn expected_reward(
    mu: &QualityVector,
    subset: &[CandidateId],
    params: RewardParams,
) -> Result<f64, RewardError> {
    check_distinct(subset)?;
    let miss = miss_probability(mu, subset)?;
    Ok(reward_from_miss(miss, subset.len(), params.eta))
}

/// Reward actually collected once the realized qualities of the selected
/// replications are known.
pub fn realized_reward(qualities: &[u8], params: RewardParams) -> Result<f64, RewardError> {
    if let Some(&q) = qualities.iter().find(|&&q| q > 1) {
        return Err(RewardError::InvalidRealizedQuality(q));
    }
    let cost = params.eta * qualities.len() as f64;
    if qualities.contains(&1) {
        Ok(1.0 - cost)
    } else {
        Ok(-cost)
    }
}

/// Gain from adding `candidate` to `base`, which reduces to
/// `mu_candidate * prod_{v in base} (1 - mu_v) - eta`.
pub fn marginal_reward(
    mu: &QualityVector,
    candidate: CandidateId,
    base: &[CandidateId],
    params: RewardParams,
) -> Result<f64, RewardError> {
    if base.contains(&candidate) {
        return Err(RewardError::CandidateInBase(candidate));
    }
    check_distinct(base)?;
    let value = mu.require(candidate)?;
    Ok(value * miss_probability(mu, base)? - params.eta)
}

/// Greedy extension of a fixed base set.
///
/// `pool` holds `(id, mu)` pairs not in the base; `base_miss` is the miss
/// probability of the base. Candidates are appended one at a time by
/// largest marginal gain (smallest id on ties) until the gain is no longer
/// strictly positive or `budget` more candidates were added.
pub fn greedy_extend(
    pool: &[(CandidateId, f64)],
    base_miss: f64,
    budget: usize,
    eta: f64,
) -> Vec<CandidateId> {
    let mut taken = vec![false; pool.len()];
    let mut miss = base_miss;
    let mut selected = Vec::with_capacity(budget.min(pool.len()));
    while selected.len() < budget {
        let mut best: Option<(usize, f64)> = None;
        for (i, &(id, value)) in pool.iter().enumerate() {
            if taken[i] {
                continue;
            }
            let gain = value * miss - eta;
            let better = match best {
                None => true,
                Some((j, g)) => gain > g || (gain == g && id < pool[j].0),
            };
            if better {
                best = Some((i, gain));
            }
        }
        match best {
            Some((i, gain)) if gain > 0.0 => {
                taken[i] = true;
                miss *= 1.0 - pool[i].1;
                selected.push(pool[i].0);
            }
            _ => break,
        }
    }
    selected
}

/// Greedy replication selection with known expected qualities.
pub fn greedy_select(
    mu: &QualityVector,
    candidates: &[CandidateId],
    budget: usize,
    params: RewardParams,
) -> Result<Vec<CandidateId>, RewardError> {
    if budget == 0 {
        return Err(RewardError::ZeroBudget);
    }
    check_distinct(candidates)?;
    let pool = candidates
        .iter()
        .map(|&id| mu.require(id).map(|v| (id, v)))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(greedy_extend(&pool, 1.0, budget, params.eta))
}

/// Exhaustive maximizer of `u` over all subsets of size at most `budget`.
///
/// Ties go to the smaller subset, then to the lexicographically smaller id
/// sequence.
pub fn brute_force_select(
    mu: &QualityVector,
    candidates: &[CandidateId],
    budget: usize,
    params: RewardParams,
) -> Result<Vec<CandidateId>, RewardError> {
    if budget == 0 {
        return Err(RewardError::ZeroBudget);
    }
    if candidates.len() > BRUTE_FORCE_LIMIT {
        return Err(RewardError::TooManyCandidates {
            count: candidates.len(),
            limit: BRUTE_FORCE_LIMIT,
        });
    }
    check_distinct(candidates)?;
    let mut ids = candidates.to_vec();
    ids.sort();
    let values = ids
        .iter()
        .map(|&id| mu.require(id))
        .collect::<Result<Vec<_>, _>>()?;

    let n = ids.len();
    let mut best: Vec<usize> = Vec::new();
    let mut best_reward = 0.0;
    for size in 1..=budget.min(n) {
        // lexicographic walk over index combinations of this size
        let mut combo: Vec<usize> = (0..size).collect();
        loop {
            let miss: f64 = combo.iter().map(|&i| 1.0 - values[i]).product();
            let reward = reward_from_miss(miss, size, params.eta);
            if reward > best_reward {
                best_reward = reward;
                best = combo.clone();
            }
            let Some(pos) = (0..size).rev().find(|&i| combo[i] != i + n - size) else {
                break;
            };
            combo[pos] += 1;
            for j in pos + 1..size {
                combo[j] = combo[j - 1] + 1;
            }
        }
    }
    Ok(best.into_iter().map(|i| ids[i]).collect())
}
