//! Deadline-aware task replication for vehicular cloud computing.
//!
//! - [`reward`]: the At-Least-One replication reward and its greedy maximizer.
//! - [`ccmab`]: the contextual-combinatorial bandit learner (DATE-V) with
//!   delayed-feedback bookkeeping.
//! - [`env`]: the vehicular-cloud world, both trace-driven and synthetic.
//! - [`trace`]: GPS trace ingestion and RSU deployment.
//! - [`baselines`]: Oracle, UCB, mLinUCB and Random behind one policy trait.
//! - [`bench`]: experiment configuration, seeded runs and regret accounting.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use rand::SeedableRng;

pub mod baselines;
pub mod bench;
pub mod ccmab;
pub mod env;
pub mod ids;
pub mod reward;
pub mod trace;

pub use ids::{CandidateId, TaskId, VehicleId};

/// Generator used for every seeded draw.
pub type SimRng = rand_chacha::ChaCha8Rng;

/// Independent generator `stream` of run `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> SimRng {
    let mut rng = SimRng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
