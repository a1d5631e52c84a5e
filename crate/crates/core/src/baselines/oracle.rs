//! Greedy selection on the true qualities.

use super::{Observation, Policy, PolicyError, PolicyKind, PolicyOutput};
use crate::env::Round;
use crate::reward::{greedy_select, Phase, ReplicationDecision, RewardParams};
use crate::SimRng;

pub fn oracle_select(round: &Round, params: RewardParams) -> Result<ReplicationDecision, PolicyError> {
    let ids: Vec<_> = round.candidates.iter().map(|c| c.id).collect();
    let selected = if ids.is_empty() {
        Vec::new()
    } else {
        greedy_select(&round.true_mu(), &ids, round.task.budget, params)?
    };
    Ok(ReplicationDecision { task_id: round.task.id, selected, phase: Phase::Oracle })
}

pub struct Oracle {
    params: RewardParams,
}

impl Oracle {
    pub fn new(params: RewardParams) -> Self {
        Self { params }
    }
}

impl Policy for Oracle {
    fn name(&self) -> &'static str {
        PolicyKind::Oracle.as_str()
    }

    fn select(&mut self, round: &Round, _t: u64, _rng: &mut SimRng) -> Result<PolicyOutput, PolicyError> {
        Ok(PolicyOutput { decision: oracle_select(round, self.params)?, misexploitation: false })
    }

    fn observe(&mut self, _obs: &Observation) -> Result<(), PolicyError> {
        Ok(())
    }
}
