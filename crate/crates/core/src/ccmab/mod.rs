//! Contextual-combinatorial bandit learner over a uniform context partition.
//!
//! Each replication candidate carries a context in `[0, 1]^D`. The learner
//! splits the context space into `h_T^D` hypercubes, keeps a selection
//! counter `C(p)`, an observation counter `M(p)` and a quality sum per cell,
//! and for every task either explores cells whose selection count is still
//! at most `K(t)` or runs the greedy rule on the per-cell estimates.
//!
//! Selection counters are charged when a decision is made and observation
//! counters when a feedback event is applied, so the same machinery serves
//! both the prompt and the delayed feedback settings.

mod config;
mod feedback;
mod learner;
mod partition;

use thiserror::Error;

use crate::ids::CandidateId;
use crate::reward::RewardError;

pub use config::{control_function, LearnerConfig};
pub use feedback::{FeedbackEvent, FeedbackQueue, Ready};
pub use learner::{
    drain_ready_feedback, identify_underexplored, is_misexploitation, observe, phase_for, DateV,
    Selection,
};
pub use partition::{cell_of, Cell, CellIndex, ContextVector, Partition};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CcmabError {
    #[error("context coordinate {axis} is {value}, outside [0, 1]")]
    InvalidContext { axis: usize, value: f64 },
    #[error("context has dimension {actual}, learner expects {expected}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("candidate {0} listed more than once")]
    DuplicateCandidate(CandidateId),
    #[error("budget must be at least 1")]
    ZeroBudget,
    #[error("realized quality must be 0 or 1, got {0}")]
    InvalidQuality(u8),
    #[error("feedback for cell {cell} would exceed its selections (C = {selected}, M = {observed})")]
    Bookkeeping {
        cell: CellIndex,
        selected: u64,
        observed: u64,
    },
    #[error("invalid learner configuration: {0}")]
    InvalidConfig(String),
    #[error("malformed partition snapshot: {0}")]
    Snapshot(String),
    #[error(transparent)]
    Reward(#[from] RewardError),
}
