//! Pre-generated task streams shared by every policy of a seed.

use crate::ccmab::ContextVector;
use crate::ids::{CandidateId, VehicleId};
use crate::reward::QualityVector;

use super::Task;

/// One available replication of a task.
#[derive(Clone, Debug, PartialEq)]
pub struct Candidate {
    pub id: CandidateId,
    pub sev: VehicleId,
    pub context: ContextVector,
    /// True success probability.
    pub mu: f64,
    /// Realized service delay, seconds; infinite when the result never
    /// arrives.
    pub delay: f64,
    /// Realized quality `1{delay <= deadline}`.
    pub quality: u8,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Round {
    pub task: Task,
    /// Sorted by candidate id.
    pub candidates: Vec<Candidate>,
}

impl Round {
    pub fn candidate(&self, id: CandidateId) -> Option<&Candidate> {
        self.candidates
            .binary_search_by_key(&id, |c| c.id)
            .ok()
            .map(|i| &self.candidates[i])
    }

    pub fn true_mu(&self) -> QualityVector {
        QualityVector::new(self.candidates.iter().map(|c| (c.id, c.mu)))
            .expect("candidates are distinct with mu in [0, 1]")
    }

    /// Simulated time at which the quality of `candidate` becomes known:
    /// on return for a success, at deadline expiry for a failure.
    pub fn ready_time(&self, candidate: &Candidate) -> f64 {
        let wait = if candidate.quality == 1 { candidate.delay } else { self.task.deadline };
        self.task.arrival_time + wait
    }
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct Episode {
    pub rounds: Vec<Round>,
    /// Arrival times that found no TaV in coverage.
    pub dropped: Vec<f64>,
    pub context_dim: usize,
}

impl Episode {
    pub fn len(&self) -> usize {
        self.rounds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rounds.is_empty()
    }
}
