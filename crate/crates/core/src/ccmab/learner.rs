//! The partition learner: under-exploration test, the three selection
//! phases and the delayed-feedback bookkeeping.

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::Rng;

use super::{
    control_function, CcmabError, CellIndex, ContextVector, FeedbackEvent, FeedbackQueue,
    LearnerConfig, Partition,
};
use crate::ids::{CandidateId, TaskId};
use crate::reward::{greedy_extend, Phase, ReplicationDecision};

/// Candidates whose cell satisfies `C(p) <= K(t)`, in input order.
pub fn identify_underexplored(
    candidates: &[(CandidateId, CellIndex)],
    t: u64,
    partition: &Partition,
    config: &LearnerConfig,
) -> Vec<CandidateId> {
    let k = control_function(t, config);
    candidates
        .iter()
        .filter(|(_, cell)| partition.cell(cell).selected as f64 <= k)
        .map(|&(id, _)| id)
        .collect()
}

/// An exploitation round is a mis-exploitation when some involved cell
/// satisfies `M(p) < K(t) <= C(p)`.
pub fn is_misexploitation<'a>(
    cells: impl IntoIterator<Item = &'a CellIndex>,
    t: u64,
    partition: &Partition,
    config: &LearnerConfig,
) -> bool {
    let k = control_function(t, config);
    cells.into_iter().any(|p| {
        let cell = partition.cell(p);
        (cell.observed as f64) < k && k <= cell.selected as f64
    })
}

/// Phase implied by the number of under-explored candidates and the budget.
pub fn phase_for(underexplored: usize, budget: usize) -> Phase {
    if underexplored == 0 {
        Phase::Exploitation
    } else if underexplored >= budget {
        Phase::Exploration
    } else {
        Phase::SemiExploration
    }
}

/// Applies one observation: `M += 1`, the quality joins the running sum.
pub fn observe(event: &FeedbackEvent, partition: &mut Partition) -> Result<(), CcmabError> {
    if event.quality > 1 {
        return Err(CcmabError::InvalidQuality(event.quality));
    }
    let corrupt = |selected, observed| CcmabError::Bookkeeping {
        cell: event.cell.clone(),
        selected,
        observed,
    };
    let cell = partition.get_mut(&event.cell).ok_or_else(|| corrupt(0, 0))?;
    if cell.observed >= cell.selected {
        return Err(corrupt(cell.selected, cell.observed));
    }
    cell.observed += 1;
    cell.quality_sum += event.quality as f64;
    Ok(())
}

/// Applies every queued event with `ready_time <= now`.
pub fn drain_ready_feedback(
    now: f64,
    queue: &mut FeedbackQueue<FeedbackEvent>,
    partition: &mut Partition,
) -> Result<usize, CcmabError> {
    let mut applied = 0;
    while let Some(event) = queue.pop_ready(now) {
        observe(&event, partition)?;
        applied += 1;
    }
    Ok(applied)
}

/// Outcome of [`DateV::select`].
#[derive(Clone, Debug, PartialEq)]
pub struct Selection {
    pub decision: ReplicationDecision,
    /// Cell of every selected candidate, aligned with `decision.selected`.
    pub cells: Vec<CellIndex>,
    /// Number of under-explored candidates `z`.
    pub underexplored: usize,
    pub misexploitation: bool,
}

/// Learner state for one RSU.
#[derive(Clone, Debug)]
pub struct DateV {
    config: LearnerConfig,
    partition: Partition,
}

impl DateV {
    pub fn new(config: LearnerConfig) -> Result<Self, CcmabError> {
        config.validate()?;
        let partition = Partition::new(&config);
        Ok(Self { config, partition })
    }

    pub fn config(&self) -> &LearnerConfig {
        &self.config
    }

    pub fn partition(&self) -> &Partition {
        &self.partition
    }

    pub fn partition_mut(&mut self) -> &mut Partition {
        &mut self.partition
    }

    pub fn locate(&self, phi: &ContextVector) -> Result<CellIndex, CcmabError> {
        self.partition.locate(phi)
    }

    /// Chooses the replications of task `t` and charges `C(p)` for each
    /// selected candidate's cell.
    pub fn select<R: Rng + ?Sized>(
        &mut self,
        task_id: TaskId,
        budget: usize,
        candidates: &[(CandidateId, &ContextVector)],
        t: u64,
        rng: &mut R,
    ) -> Result<Selection, CcmabError> {
        if budget == 0 {
            return Err(CcmabError::ZeroBudget);
        }
        if t == 0 {
            return Err(CcmabError::InvalidConfig("task index starts at 1".into()));
        }
        let mut seen = HashSet::with_capacity(candidates.len());
        let mut located = Vec::with_capacity(candidates.len());
        for &(id, phi) in candidates {
            if !seen.insert(id) {
                return Err(CcmabError::DuplicateCandidate(id));
            }
            located.push((id, self.partition.locate(phi)?));
        }

        let ue = identify_underexplored(&located, t, &self.partition, &self.config);
        let z = ue.len();
        let phase = phase_for(z, budget);
        let eta = self.config.reward.eta();
        let estimate = |i: usize| (located[i].0, self.partition.estimate(&located[i].1));

        let mut misexploitation = false;
        let selected: Vec<CandidateId> = match phase {
            Phase::Exploration => {
                let mut pool = ue;
                let (chosen, _) = pool.partial_shuffle(rng, budget);
                chosen.to_vec()
            }
            Phase::SemiExploration => {
                let ue_set: HashSet<CandidateId> = ue.iter().copied().collect();
                let mut base_miss = 1.0;
                let mut rest = Vec::new();
                for i in 0..located.len() {
                    let (id, mu) = estimate(i);
                    if ue_set.contains(&id) {
                        base_miss *= 1.0 - mu;
                    } else {
                        rest.push((id, mu));
                    }
                }
                let mut chosen = ue;
                chosen.extend(greedy_extend(&rest, base_miss, budget - z, eta));
                chosen
            }
            _ => {
                misexploitation = is_misexploitation(
                    located.iter().map(|(_, p)| p),
                    t,
                    &self.partition,
                    &self.config,
                );
                let pool: Vec<_> = (0..located.len()).map(estimate).collect();
                greedy_extend(&pool, 1.0, budget, eta)
            }
        };

        let cells: Vec<CellIndex> = selected
            .iter()
            .map(|id| {
                located
                    .iter()
                    .find(|(c, _)| c == id)
                    .map(|(_, p)| p.clone())
                    .expect("selected candidates come from the input")
            })
            .collect();
        for p in &cells {
            self.partition.cell_mut(p).selected += 1;
        }

        Ok(Selection {
            decision: ReplicationDecision {
                task_id,
                selected,
                phase,
            },
            cells,
            underexplored: z,
            misexploitation,
        })
    }

    pub fn observe(&mut self, event: &FeedbackEvent) -> Result<(), CcmabError> {
        observe(event, &mut self.partition)
    }

    pub fn drain_ready_feedback(
        &mut self,
        now: f64,
        queue: &mut FeedbackQueue<FeedbackEvent>,
    ) -> Result<usize, CcmabError> {
        drain_ready_feedback(now, queue, &mut self.partition)
    }
}
