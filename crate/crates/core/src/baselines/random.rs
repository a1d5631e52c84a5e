//! Uniformly random replications.

use rand::seq::index;
use rand::Rng;

use super::{Observation, Policy, PolicyError, PolicyKind, PolicyOutput};
use crate::env::Round;
use crate::reward::{Phase, ReplicationDecision};
use crate::SimRng;

/// `min(b, n)` distinct candidates, uniformly at random, in id order.
pub fn random_select<R: Rng + ?Sized>(round: &Round, rng: &mut R) -> ReplicationDecision {
    let n = round.candidates.len();
    let mut picks = index::sample(rng, n, round.task.budget.min(n)).into_vec();
    picks.sort_unstable();
    ReplicationDecision {
        task_id: round.task.id,
        selected: picks.into_iter().map(|i| round.candidates[i].id).collect(),
        phase: Phase::Baseline,
    }
}

#[derive(Default)]
pub struct RandomPolicy;

impl Policy for RandomPolicy {
    fn name(&self) -> &'static str {
        PolicyKind::Random.as_str()
    }

    fn select(&mut self, round: &Round, _t: u64, rng: &mut SimRng) -> Result<PolicyOutput, PolicyError> {
        Ok(PolicyOutput { decision: random_select(round, rng), misexploitation: false })
    }

    fn observe(&mut self, _obs: &Observation) -> Result<(), PolicyError> {
        Ok(())
    }
}
