//! Deadline-constrained tasks and their Poisson arrival process.

use rand::Rng;
use rand_distr::{Distribution, Exp};
use serde::{Deserialize, Serialize};

use super::EnvError;
use crate::ids::{TaskId, VehicleId};

#[derive(Clone, Debug, PartialEq)]
pub struct Task {
    pub id: TaskId,
    /// Input size, bits.
    pub x_bits: f64,
    /// Result size, bits.
    pub y_bits: f64,
    /// Required CPU cycles.
    pub w_cycles: f64,
    /// Maximum number of replications.
    pub budget: usize,
    /// Relative deadline, seconds.
    pub deadline: f64,
    /// Simulated arrival time, seconds.
    pub arrival_time: f64,
    pub tav: VehicleId,
}

/// Distributions every generated task is drawn from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TaskParams {
    /// Arrival rate, tasks/s.
    pub arrival_rate: f64,
    pub input_bits: f64,
    pub result_bits: f64,
    pub cycles: f64,
    /// Deadline drawn uniformly from `[lo, hi]`, seconds.
    pub deadline: (f64, f64),
    /// Budget drawn uniformly from `{lo, .., hi}`.
    pub budget: (usize, usize),
}

impl Default for TaskParams {
    fn default() -> Self {
        Self {
            arrival_rate: 1.0,
            input_bits: 1e6,
            result_bits: 0.5e6,
            cycles: 200e6,
            deadline: (1.0, 2.5),
            budget: (1, 5),
        }
    }
}

impl TaskParams {
    pub fn validate(&self) -> Vec<String> {
        let mut errors = Vec::new();
        if !(self.arrival_rate > 0.0 && self.arrival_rate.is_finite()) {
            errors.push(format!("tasks.arrival_rate must be positive, got {}", self.arrival_rate));
        }
        for (name, v) in [
            ("input_bits", self.input_bits),
            ("result_bits", self.result_bits),
            ("cycles", self.cycles),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                errors.push(format!("tasks.{name} must be positive, got {v}"));
            }
        }
        let (lo, hi) = self.deadline;
        if !(lo > 0.0 && lo <= hi && hi.is_finite()) {
            errors.push(format!("tasks.deadline must be a positive range, got [{lo}, {hi}]"));
        }
        let (blo, bhi) = self.budget;
        if !(blo >= 1 && blo <= bhi) {
            errors.push(format!("tasks.budget must satisfy 1 <= lo <= hi, got [{blo}, {bhi}]"));
        }
        errors
    }

    pub fn sample_deadline<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let (lo, hi) = self.deadline;
        if lo == hi {
            lo
        } else {
            rng.random_range(lo..=hi)
        }
    }

    pub fn sample_budget<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        rng.random_range(self.budget.0..=self.budget.1)
    }

    /// A task with the fixed sizes of this parameter set.
    pub fn draw<R: Rng + ?Sized>(&self, id: TaskId, arrival_time: f64, tav: VehicleId, rng: &mut R) -> Task {
        let deadline = self.sample_deadline(rng);
        let budget = self.sample_budget(rng);
        Task {
            id,
            x_bits: self.input_bits,
            y_bits: self.result_bits,
            w_cycles: self.cycles,
            budget,
            deadline,
            arrival_time,
            tav,
        }
    }
}

/// Arrival times of a homogeneous Poisson process, starting after 0.
pub struct PoissonArrivals<R> {
    gap: Exp<f64>,
    now: f64,
    rng: R,
}

impl<R: Rng> PoissonArrivals<R> {
    pub fn new(rate: f64, rng: R) -> Result<Self, EnvError> {
        let gap = Exp::new(rate)
            .ok()
            .filter(|_| rate > 0.0)
            .ok_or_else(|| EnvError::InvalidArgument(format!("arrival rate must be positive, got {rate}")))?;
        Ok(Self { gap, now: 0.0, rng })
    }
}

impl<R: Rng> Iterator for PoissonArrivals<R> {
    type Item = f64;

    fn next(&mut self) -> Option<f64> {
        self.now += self.gap.sample(&mut self.rng);
        Some(self.now)
    }
}

/// Outcome of [`generate_tasks`].
#[derive(Clone, Debug, Default)]
pub struct TaskStream {
    pub tasks: Vec<Task>,
    /// Arrivals with no eligible TaV in coverage.
    pub dropped: usize,
}

/// Draws `count` tasks at Poisson arrival times. `pick_tav` returns the
/// requesting vehicle for an arrival time, or `None` when nobody is in
/// coverage, in which case the arrival is dropped. Generation also stops
/// after `max_arrivals` attempts.
pub fn generate_tasks<A, R, F>(
    arrivals: A,
    count: usize,
    max_arrivals: usize,
    params: &TaskParams,
    rng: &mut R,
    mut pick_tav: F,
) -> TaskStream
where
    A: Iterator<Item = f64>,
    R: Rng + ?Sized,
    F: FnMut(f64, &mut R) -> Option<VehicleId>,
{
    let mut stream = TaskStream::default();
    for time in arrivals.take(max_arrivals) {
        if stream.tasks.len() >= count {
            break;
        }
        match pick_tav(time, rng) {
            Some(tav) => {
                let id = TaskId(stream.tasks.len() as u64 + 1);
                stream.tasks.push(params.draw(id, time, tav, rng));
            }
            None => stream.dropped += 1,
        }
    }
    stream
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn poisson_counts_within_three_sigma() {
        // over 1000 s at 0.5/s: mean 500, sd sqrt(500)
        let sd = 500f64.sqrt();
        for seed in 0..20 {
            let arrivals = PoissonArrivals::new(0.5, ChaCha8Rng::seed_from_u64(seed)).unwrap();
            let n = arrivals.take_while(|&t| t <= 1000.0).count() as f64;
            assert!((n - 500.0).abs() <= 3.0 * sd, "seed {seed}: {n}");
        }
        assert!(PoissonArrivals::new(0.0, ChaCha8Rng::seed_from_u64(0)).is_err());
    }

    #[test]
    fn default_tasks_use_fixed_sizes_and_deadline_range() {
        let params = TaskParams::default();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let arrivals = PoissonArrivals::new(1.0, ChaCha8Rng::seed_from_u64(5)).unwrap();
        let stream = generate_tasks(arrivals, 2000, usize::MAX, &params, &mut rng, |_, _| Some(VehicleId(3)));
        assert_eq!(stream.tasks.len(), 2000);
        for task in &stream.tasks {
            assert_eq!((task.x_bits, task.y_bits, task.w_cycles), (1e6, 5e5, 2e8));
            assert!((1.0..=2.5).contains(&task.deadline));
            assert!((1..=5).contains(&task.budget));
        }
        let ids: Vec<u64> = stream.tasks.iter().map(|t| t.id.0).collect();
        assert_eq!(ids, (1..=2000).collect::<Vec<_>>());
        assert!(stream.tasks.windows(2).all(|w| w[1].arrival_time > w[0].arrival_time));
    }

    #[test]
    fn arrivals_without_tav_are_dropped() {
        let params = TaskParams::default();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let arrivals = PoissonArrivals::new(1.0, ChaCha8Rng::seed_from_u64(5)).unwrap();
        let mut k = 0;
        let stream = generate_tasks(arrivals, 10, 1000, &params, &mut rng, |_, _| {
            k += 1;
            (k % 2 == 0).then_some(VehicleId(1))
        });
        assert_eq!(stream.tasks.len(), 10);
        assert_eq!(stream.dropped, 10);
    }

    #[test]
    fn validation_lists_every_problem() {
        let bad = TaskParams { arrival_rate: 0.0, deadline: (2.0, 1.0), budget: (0, 3), ..TaskParams::default() };
        assert_eq!(bad.validate().len(), 3);
        assert!(TaskParams::default().validate().is_empty());
    }
}
