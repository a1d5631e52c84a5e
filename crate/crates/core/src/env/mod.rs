//! The vehicular-cloud world.
//!
//! Two environments produce the same [`Episode`] shape: a trace-driven
//! [`World`] with RSU coverage, SINR-gated availability and the
//! four-segment service delay, and a [`SyntheticWorld`] whose replication
//! qualities are known in closed form.

mod context;
mod delay;
mod episode;
mod mobility;
mod radio;
mod synthetic;
mod task;
mod world;

use thiserror::Error;

use crate::ids::VehicleId;

pub use context::{normalize, ContextBounds};
pub use delay::{realize_quality, DelayBreakdown, DelayPlan};
pub use episode::{Candidate, Episode, Round};
pub use mobility::{Point, Role, RoleAssignment, RsuLayout, Trajectory, Vehicle};
pub use radio::{dbm_to_watts, shannon_rate, sinr, RadioParams};
pub use synthetic::{SyntheticParams, SyntheticWorld};
pub use task::{generate_tasks, PoissonArrivals, Task, TaskParams, TaskStream};
pub use world::{World, WorldParams, MONTE_CARLO_SAMPLES};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EnvError {
    #[error("trace of vehicle {vehicle} has no position at t = {time}")]
    TraceExhausted { vehicle: VehicleId, time: f64 },
    #[error("vehicle {vehicle} is outside every RSU at t = {time}")]
    NoCoverage { vehicle: VehicleId, time: f64 },
    #[error("unknown vehicle {0}")]
    UnknownVehicle(VehicleId),
    #[error("{0}")]
    InvalidArgument(String),
}
