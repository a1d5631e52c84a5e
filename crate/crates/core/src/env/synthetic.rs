//! A trace-free world with closed-form replication qualities.
//!
//! Each candidate has a base delay `a` drawn uniformly from a range and a
//! service delay `a + J` with return jitter `J ~ U[0, s]`. For deadline
//! `L` the success probability is `clamp((L - a) / s, 0, 1)`. The context
//! is `(a, L)` min-max normalized, so the quality is a Lipschitz function
//! of the context with constant `sqrt(da^2 + dL^2) / s`, where `da` and
//! `dL` are the widths of the normalization ranges.

use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::context::normalize;
use super::{Candidate, EnvError, Episode, PoissonArrivals, Round, TaskParams};
use crate::ccmab::ContextVector;
use crate::ids::{CandidateId, VehicleId};
use crate::stream_rng;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SyntheticParams {
    pub fleet_size: u32,
    /// Candidates per task, drawn uniformly from `{lo, .., hi}`.
    pub candidates: (usize, usize),
    /// Base delay range, seconds.
    pub base_delay: (f64, f64),
    /// Width of the uniform return jitter, seconds.
    pub jitter: f64,
    /// Deadline normalization range; the task deadline range when unset.
    pub deadline_bounds: Option<(f64, f64)>,
}

impl Default for SyntheticParams {
    fn default() -> Self {
        Self {
            fleet_size: 200,
            candidates: (6, 12),
            base_delay: (0.5, 1.25),
            jitter: 0.75,
            deadline_bounds: None,
        }
    }
}

impl SyntheticParams {
    pub fn validate(&self) -> Vec<String> {
        let mut errors = Vec::new();
        let (lo, hi) = self.candidates;
        if !(1 <= lo && lo <= hi) {
            errors.push(format!("synthetic.candidates must satisfy 1 <= lo <= hi, got [{lo}, {hi}]"));
        }
        if (self.fleet_size as usize) <= hi {
            errors.push(format!(
                "synthetic.fleet_size must exceed the largest candidate count, got {}",
                self.fleet_size
            ));
        }
        let (alo, ahi) = self.base_delay;
        if !(alo >= 0.0 && alo < ahi && ahi.is_finite()) {
            errors.push(format!("synthetic.base_delay must satisfy 0 <= lo < hi, got [{alo}, {ahi}]"));
        }
        if !(self.jitter > 0.0 && self.jitter.is_finite()) {
            errors.push(format!("synthetic.jitter must be positive, got {}", self.jitter));
        }
        if let Some((dlo, dhi)) = self.deadline_bounds {
            if !(dlo < dhi) {
                errors.push(format!("synthetic.deadline_bounds must satisfy lo < hi, got [{dlo}, {dhi}]"));
            }
        }
        errors
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SyntheticWorld {
    params: SyntheticParams,
    tasks: TaskParams,
    deadline_bounds: (f64, f64),
}

impl SyntheticWorld {
    pub const CONTEXT_DIM: usize = 2;

    pub fn new(params: SyntheticParams, tasks: TaskParams) -> Result<Self, EnvError> {
        let mut errors = params.validate();
        errors.extend(tasks.validate());
        if !errors.is_empty() {
            return Err(EnvError::InvalidArgument(errors.join("; ")));
        }
        let deadline_bounds = params.deadline_bounds.unwrap_or(tasks.deadline);
        Ok(Self { params, tasks, deadline_bounds })
    }

    pub fn params(&self) -> &SyntheticParams {
        &self.params
    }

    pub fn tasks(&self) -> &TaskParams {
        &self.tasks
    }

    /// `Pr{a + J <= deadline}`.
    pub fn mu(&self, base_delay: f64, deadline: f64) -> f64 {
        ((deadline - base_delay) / self.params.jitter).clamp(0.0, 1.0)
    }

    /// Quality as a function of the normalized context.
    pub fn mu_at(&self, phi: &[f64]) -> f64 {
        let (alo, ahi) = self.params.base_delay;
        let (dlo, dhi) = self.deadline_bounds;
        self.mu(alo + phi[0] * (ahi - alo), dlo + phi[1] * (dhi - dlo))
    }

    /// Lipschitz constant of [`Self::mu_at`] in the Euclidean norm.
    pub fn holder_constant(&self) -> f64 {
        let (alo, ahi) = self.params.base_delay;
        let (dlo, dhi) = self.deadline_bounds;
        (ahi - alo).hypot(dhi - dlo) / self.params.jitter
    }

    pub fn context(&self, base_delay: f64, deadline: f64) -> ContextVector {
        ContextVector::new(vec![
            normalize(base_delay, self.params.base_delay),
            normalize(deadline, self.deadline_bounds),
        ])
        .expect("normalized coordinates lie in [0, 1]")
    }

    pub fn sample_delay<R: Rng + ?Sized>(&self, base_delay: f64, rng: &mut R) -> f64 {
        base_delay + rng.random_range(0.0..=self.params.jitter)
    }

    /// `horizon` tasks for `seed`. Arrival times and task content use
    /// separate generator streams.
    pub fn episode(&self, horizon: usize, seed: u64) -> Episode {
        let arrivals = PoissonArrivals::new(self.tasks.arrival_rate, stream_rng(seed, 1))
            .expect("validated arrival rate");
        let mut rng = stream_rng(seed, 2);
        let fleet = self.params.fleet_size as usize;
        let (alo, ahi) = self.params.base_delay;
        let rounds = arrivals
            .take(horizon)
            .enumerate()
            .map(|(i, time)| {
                let tav = rng.random_range(0..fleet);
                let task = self.tasks.draw(crate::TaskId(i as u64 + 1), time, VehicleId(tav as u32), &mut rng);
                let n = rng.random_range(self.params.candidates.0..=self.params.candidates.1);
                let mut sevs: Vec<usize> = index::sample(&mut rng, fleet - 1, n)
                    .into_iter()
                    .map(|j| if j >= tav { j + 1 } else { j })
                    .collect();
                sevs.sort_unstable();
                let candidates = sevs
                    .into_iter()
                    .map(|sev| {
                        let a = rng.random_range(alo..=ahi);
                        let delay = self.sample_delay(a, &mut rng);
                        Candidate {
                            id: CandidateId(sev as u32),
                            sev: VehicleId(sev as u32),
                            context: self.context(a, task.deadline),
                            mu: self.mu(a, task.deadline),
                            delay,
                            quality: u8::from(delay <= task.deadline),
                        }
                    })
                    .collect();
                Round { task, candidates }
            })
            .collect();
        Episode { rounds, dropped: Vec::new(), context_dim: Self::CONTEXT_DIM }
    }
}
