//! UCB1 repeated `b` times per task.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::{top_k, Observation, Policy, PolicyError, PolicyKind, PolicyOutput};
use crate::env::Round;
use crate::ids::VehicleId;
use crate::reward::{Phase, ReplicationDecision};
use crate::SimRng;

/// What identifies an arm.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum UcbArmKey {
    #[default]
    Sev,
    Pair,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ArmKey {
    Sev(VehicleId),
    Pair { tav: VehicleId, sev: VehicleId },
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
struct Arm {
    pulls: u64,
    quality_sum: f64,
}

pub struct Ucb {
    key: UcbArmKey,
    arms: HashMap<ArmKey, Arm>,
}

impl Ucb {
    pub fn new(key: UcbArmKey) -> Self {
        Self { key, arms: HashMap::new() }
    }

    fn arm_key(&self, tav: VehicleId, sev: VehicleId) -> ArmKey {
        match self.key {
            UcbArmKey::Sev => ArmKey::Sev(sev),
            UcbArmKey::Pair => ArmKey::Pair { tav, sev },
        }
    }

    /// `mean + sqrt(2 ln t / n)`, infinite for an arm never pulled.
    pub fn index(&self, arm: ArmKey, t: u64) -> f64 {
        match self.arms.get(&arm) {
            Some(a) if a.pulls > 0 => {
                let n = a.pulls as f64;
                a.quality_sum / n + (2.0 * (t as f64).ln() / n).sqrt()
            }
            _ => f64::INFINITY,
        }
    }

    pub fn pulls(&self, arm: ArmKey) -> u64 {
        self.arms.get(&arm).map_or(0, |a| a.pulls)
    }

    pub fn record(&mut self, arm: ArmKey, quality: u8) {
        let a = self.arms.entry(arm).or_default();
        a.pulls += 1;
        a.quality_sum += f64::from(quality);
    }
}

impl Policy for Ucb {
    fn name(&self) -> &'static str {
        PolicyKind::Ucb.as_str()
    }

    fn select(&mut self, round: &Round, t: u64, _rng: &mut SimRng) -> Result<PolicyOutput, PolicyError> {
        let tav = round.task.tav;
        let scores: Vec<f64> = round
            .candidates
            .iter()
            .map(|c| self.index(self.arm_key(tav, c.sev), t))
            .collect();
        let selected = top_k(&scores, round.task.budget)
            .into_iter()
            .map(|i| round.candidates[i].id)
            .collect();
        Ok(PolicyOutput {
            decision: ReplicationDecision { task_id: round.task.id, selected, phase: Phase::Baseline },
            misexploitation: false,
        })
    }

    fn observe(&mut self, obs: &Observation) -> Result<(), PolicyError> {
        self.record(self.arm_key(obs.tav, obs.sev), obs.quality);
        Ok(())
    }
}
