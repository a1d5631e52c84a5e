//! Policies that compete on the same task stream.
//!
//! Every policy sees a [`Round`] and the task index, returns a decision
//! of at most `b` replications, and later receives one [`Observation`] per
//! selected replication once its quality becomes visible.

mod linucb;
mod oracle;
mod random;
mod ucb;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ccmab::{CcmabError, ContextVector, DateV, FeedbackEvent, LearnerConfig, Ready};
use crate::env::Round;
use crate::ids::{CandidateId, TaskId, VehicleId};
use crate::reward::{ReplicationDecision, RewardError};
use crate::SimRng;

pub use linucb::MLinUcb;
pub use oracle::{oracle_select, Oracle};
pub use random::{random_select, RandomPolicy};
pub use ucb::{ArmKey, Ucb, UcbArmKey};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PolicyError {
    #[error(transparent)]
    Learner(#[from] CcmabError),
    #[error(transparent)]
    Reward(#[from] RewardError),
    #[error("context has dimension {actual}, policy expects {expected}")]
    DimensionMismatch { expected: usize, actual: usize },
}

/// Realized quality of one selected replication.
#[derive(Clone, Debug, PartialEq)]
pub struct Observation {
    pub task_id: TaskId,
    pub candidate: CandidateId,
    pub sev: VehicleId,
    pub tav: VehicleId,
    pub context: ContextVector,
    pub quality: u8,
    pub ready_time: f64,
}

impl Ready for Observation {
    fn ready_time(&self) -> f64 {
        self.ready_time
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PolicyOutput {
    pub decision: ReplicationDecision,
    pub misexploitation: bool,
}

pub trait Policy: Send {
    fn name(&self) -> &'static str;

    fn select(&mut self, round: &Round, t: u64, rng: &mut SimRng) -> Result<PolicyOutput, PolicyError>;

    fn observe(&mut self, obs: &Observation) -> Result<(), PolicyError>;
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PolicyKind {
    Datev,
    Oracle,
    Ucb,
    Mlinucb,
    Random,
}

impl PolicyKind {
    pub const ALL: [PolicyKind; 5] = [
        PolicyKind::Datev,
        PolicyKind::Oracle,
        PolicyKind::Ucb,
        PolicyKind::Mlinucb,
        PolicyKind::Random,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            PolicyKind::Datev => "datev",
            PolicyKind::Oracle => "oracle",
            PolicyKind::Ucb => "ucb",
            PolicyKind::Mlinucb => "mlinucb",
            PolicyKind::Random => "random",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.as_str() == s)
    }
}

impl std::fmt::Display for PolicyKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// The contextual learner behind the [`Policy`] interface.
pub struct DateVPolicy {
    learner: DateV,
}

impl DateVPolicy {
    pub fn new(config: LearnerConfig) -> Result<Self, PolicyError> {
        Ok(Self { learner: DateV::new(config)? })
    }

    pub fn learner(&self) -> &DateV {
        &self.learner
    }
}

impl Policy for DateVPolicy {
    fn name(&self) -> &'static str {
        PolicyKind::Datev.as_str()
    }

    fn select(&mut self, round: &Round, t: u64, rng: &mut SimRng) -> Result<PolicyOutput, PolicyError> {
        let candidates: Vec<_> = round.candidates.iter().map(|c| (c.id, &c.context)).collect();
        if candidates.is_empty() {
            return Ok(PolicyOutput {
                decision: ReplicationDecision {
                    task_id: round.task.id,
                    selected: Vec::new(),
                    phase: crate::reward::Phase::Exploitation,
                },
                misexploitation: false,
            });
        }
        let s = self.learner.select(round.task.id, round.task.budget, &candidates, t, rng)?;
        Ok(PolicyOutput { decision: s.decision, misexploitation: s.misexploitation })
    }

    fn observe(&mut self, obs: &Observation) -> Result<(), PolicyError> {
        let event = FeedbackEvent {
            task_id: obs.task_id,
            candidate: obs.candidate,
            cell: self.learner.locate(&obs.context)?,
            quality: obs.quality,
            ready_time: obs.ready_time,
        };
        Ok(self.learner.observe(&event)?)
    }
}

/// Indices of the `k` largest scores, highest first; ties keep the earlier
/// index.
pub(crate) fn top_k(scores: &[f64], k: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
    order.truncate(k);
    order
}
