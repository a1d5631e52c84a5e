//! Vehicle positions along piecewise-linear trajectories, roles and RSU
//! coverage.

use serde::{Deserialize, Serialize};

use super::EnvError;
use crate::ids::VehicleId;

/// Local planar coordinates, meters.
#[derive(Clone, Copy, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(self, other: Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    fn lerp(self, other: Point, w: f64) -> Point {
        Point::new(self.x + w * (other.x - self.x), self.y + w * (other.y - self.y))
    }
}

/// A time-indexed position sequence with strictly increasing timestamps.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    times: Vec<f64>,
    points: Vec<Point>,
}

impl Trajectory {
    pub fn new(samples: Vec<(f64, Point)>) -> Result<Self, EnvError> {
        if samples.is_empty() {
            return Err(EnvError::InvalidArgument("trajectory needs at least one sample".into()));
        }
        if let Some(w) = samples.windows(2).find(|w| !(w[1].0 > w[0].0)) {
            return Err(EnvError::InvalidArgument(format!(
                "trajectory timestamps must increase strictly ({} then {})",
                w[0].0, w[1].0
            )));
        }
        let (times, points) = samples.into_iter().unzip();
        Ok(Self { times, points })
    }

    pub fn start(&self) -> f64 {
        self.times[0]
    }

    pub fn end(&self) -> f64 {
        *self.times.last().expect("non-empty")
    }

    pub fn covers(&self, t: f64) -> bool {
        t >= self.start() && t <= self.end()
    }

    pub fn samples(&self) -> impl Iterator<Item = (f64, Point)> + '_ {
        self.times.iter().copied().zip(self.points.iter().copied())
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Index `i` of the segment `[t_i, t_{i+1}]` enclosing `t`.
    fn segment(&self, t: f64) -> Option<usize> {
        if !self.covers(t) || self.times.len() < 2 {
            return None;
        }
        let i = self.times.partition_point(|&s| s <= t);
        Some(i.saturating_sub(1).min(self.times.len() - 2))
    }

    /// Linearly interpolated position at `t`.
    pub fn position(&self, t: f64) -> Option<Point> {
        if !self.covers(t) {
            return None;
        }
        let Some(i) = self.segment(t) else {
            return Some(self.points[0]);
        };
        let (t0, t1) = (self.times[i], self.times[i + 1]);
        Some(self.points[i].lerp(self.points[i + 1], (t - t0) / (t1 - t0)))
    }

    /// Speed over the segment enclosing `t`, m/s.
    pub fn speed(&self, t: f64) -> Option<f64> {
        if !self.covers(t) {
            return None;
        }
        let Some(i) = self.segment(t) else {
            return Some(0.0);
        };
        Some(self.points[i].distance(self.points[i + 1]) / (self.times[i + 1] - self.times[i]))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Vehicle {
    pub id: VehicleId,
    /// Disjoint trajectories in time order; the position is undefined
    /// between them.
    pub segments: Vec<Trajectory>,
    /// CPU frequency offered when serving, cycles/s.
    pub cpu_hz: f64,
}

impl Vehicle {
    pub fn new(id: VehicleId, segments: Vec<Trajectory>, cpu_hz: f64) -> Result<Self, EnvError> {
        if !(cpu_hz > 0.0) {
            return Err(EnvError::InvalidArgument(format!("vehicle {id}: cpu frequency must be positive")));
        }
        if segments.windows(2).any(|w| !(w[1].start() > w[0].end())) {
            return Err(EnvError::InvalidArgument(format!("vehicle {id}: trajectory segments overlap")));
        }
        Ok(Self { id, segments, cpu_hz })
    }

    fn trajectory_at(&self, t: f64) -> Option<&Trajectory> {
        let i = self.segments.partition_point(|s| s.end() < t);
        self.segments.get(i).filter(|s| s.covers(t))
    }

    pub fn position(&self, t: f64) -> Option<Point> {
        self.trajectory_at(t)?.position(t)
    }

    pub fn speed(&self, t: f64) -> Option<f64> {
        self.trajectory_at(t)?.speed(t)
    }

    pub fn require_position(&self, t: f64) -> Result<Point, EnvError> {
        self.position(t).ok_or(EnvError::TraceExhausted { vehicle: self.id, time: t })
    }

    pub fn first_time(&self) -> Option<f64> {
        self.segments.first().map(Trajectory::start)
    }

    pub fn last_time(&self) -> Option<f64> {
        self.segments.last().map(Trajectory::end)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Role {
    TaskVehicle,
    ServerVehicle,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Deterministic role draw: a vehicle is a SeV with probability
/// `sev_fraction`, redrawn every `epoch_s` seconds when set.
#[derive(Clone, Debug, PartialEq)]
pub struct RoleAssignment {
    pub sev_fraction: f64,
    pub epoch_s: Option<f64>,
    pub seed: u64,
}

impl RoleAssignment {
    pub fn role(&self, vehicle: VehicleId, t: f64) -> Role {
        let epoch = match self.epoch_s {
            Some(len) if len > 0.0 => (t / len).floor() as i64 as u64,
            _ => 0,
        };
        let h = splitmix64(self.seed ^ splitmix64(vehicle.0 as u64 ^ splitmix64(epoch)));
        let u = (h >> 11) as f64 / (1u64 << 53) as f64;
        if u < self.sev_fraction {
            Role::ServerVehicle
        } else {
            Role::TaskVehicle
        }
    }
}

/// Roadside units with a common coverage radius.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RsuLayout {
    pub positions: Vec<Point>,
    pub coverage_radius: f64,
}

impl RsuLayout {
    pub fn new(positions: Vec<Point>, coverage_radius: f64) -> Result<Self, EnvError> {
        if !(coverage_radius > 0.0) {
            return Err(EnvError::InvalidArgument("coverage radius must be positive".into()));
        }
        if positions.is_empty() {
            return Err(EnvError::InvalidArgument("at least one RSU is required".into()));
        }
        Ok(Self { positions, coverage_radius })
    }

    pub fn covers(&self, rsu: usize, p: Point) -> bool {
        self.positions[rsu].distance(p) <= self.coverage_radius
    }

    /// Closest RSU whose coverage contains `p`.
    pub fn nearest_covering(&self, p: Point) -> Option<usize> {
        self.positions
            .iter()
            .enumerate()
            .map(|(i, r)| (i, r.distance(p)))
            .filter(|&(_, d)| d <= self.coverage_radius)
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .map(|(i, _)| i)
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }
}
