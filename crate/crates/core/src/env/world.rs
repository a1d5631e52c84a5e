//! Trace-driven world: vehicles on recorded trajectories under a set of
//! RSUs.
//!
//! Simulated time 0 corresponds to trace time `start_time`. All public
//! methods take simulated seconds.

use serde::{Deserialize, Serialize};

use super::{
    generate_tasks, shannon_rate, Candidate, ContextBounds, DelayBreakdown, DelayPlan, EnvError,
    Episode, PoissonArrivals, RadioParams, Role, RoleAssignment, Round, RsuLayout, Task,
    TaskParams, Vehicle,
};
use crate::ccmab::ContextVector;
use crate::ids::{CandidateId, VehicleId};
use crate::stream_rng;

/// Resamples of the backhaul segment behind each true quality estimate.
pub const MONTE_CARLO_SAMPLES: usize = 1000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct WorldParams {
    pub radio: RadioParams,
    pub context: ContextBounds,
    /// Fraction of vehicles acting as SeVs.
    pub sev_fraction: f64,
    /// Roles are redrawn every this many seconds when set.
    pub role_epoch_s: Option<f64>,
    pub role_seed: u64,
}

impl Default for WorldParams {
    fn default() -> Self {
        Self {
            radio: RadioParams::default(),
            context: ContextBounds::default(),
            sev_fraction: 0.5,
            role_epoch_s: None,
            role_seed: 0,
        }
    }
}

#[derive(Clone, Debug)]
pub struct World {
    vehicles: Vec<Vehicle>,
    rsus: RsuLayout,
    params: WorldParams,
    roles: RoleAssignment,
    start_time: f64,
    end_time: f64,
}

impl World {
    pub const CONTEXT_DIM: usize = 4;

    /// `start_time` defaults to the earliest trace sample.
    pub fn new(
        mut vehicles: Vec<Vehicle>,
        rsus: RsuLayout,
        params: WorldParams,
        start_time: Option<f64>,
    ) -> Result<Self, EnvError> {
        let mut errors = params.radio.validate();
        errors.extend(params.context.validate());
        if !(0.0..=1.0).contains(&params.sev_fraction) {
            errors.push(format!("sev_fraction must lie in [0, 1], got {}", params.sev_fraction));
        }
        if vehicles.is_empty() {
            errors.push("the world has no vehicles".into());
        }
        if !errors.is_empty() {
            return Err(EnvError::InvalidArgument(errors.join("; ")));
        }
        vehicles.sort_by_key(|v| v.id);
        if let Some(w) = vehicles.windows(2).find(|w| w[0].id == w[1].id) {
            return Err(EnvError::InvalidArgument(format!("vehicle {} appears twice", w[0].id)));
        }
        let first = vehicles.iter().filter_map(Vehicle::first_time).fold(f64::INFINITY, f64::min);
        let last = vehicles.iter().filter_map(Vehicle::last_time).fold(f64::NEG_INFINITY, f64::max);
        let start_time = start_time.unwrap_or(first);
        let roles = RoleAssignment {
            sev_fraction: params.sev_fraction,
            epoch_s: params.role_epoch_s,
            seed: params.role_seed,
        };
        Ok(Self { vehicles, rsus, params, roles, start_time, end_time: last - start_time })
    }

    pub fn vehicles(&self) -> &[Vehicle] {
        &self.vehicles
    }

    pub fn rsus(&self) -> &RsuLayout {
        &self.rsus
    }

    pub fn radio(&self) -> &RadioParams {
        &self.params.radio
    }

    /// Last simulated time with any trace data.
    pub fn end_time(&self) -> f64 {
        self.end_time
    }

    fn trace_time(&self, t: f64) -> f64 {
        self.start_time + t
    }

    pub fn vehicle(&self, id: VehicleId) -> Result<&Vehicle, EnvError> {
        self.vehicles
            .binary_search_by_key(&id, |v| v.id)
            .map(|i| &self.vehicles[i])
            .map_err(|_| EnvError::UnknownVehicle(id))
    }

    pub fn role(&self, id: VehicleId, t: f64) -> Role {
        self.roles.role(id, self.trace_time(t))
    }

    pub fn position(&self, id: VehicleId, t: f64) -> Result<super::Point, EnvError> {
        self.vehicle(id)?.require_position(self.trace_time(t))
    }

    pub fn speed(&self, id: VehicleId, t: f64) -> Result<f64, EnvError> {
        let tt = self.trace_time(t);
        self.vehicle(id)?
            .speed(tt)
            .ok_or(EnvError::TraceExhausted { vehicle: id, time: tt })
    }

    /// Nearest RSU covering the vehicle at `t`.
    pub fn serving_rsu(&self, id: VehicleId, t: f64) -> Result<usize, EnvError> {
        let p = self.position(id, t)?;
        self.rsus
            .nearest_covering(p)
            .ok_or(EnvError::NoCoverage { vehicle: id, time: self.trace_time(t) })
    }

    /// TaV-role vehicles inside some RSU's coverage at `t`.
    pub fn task_vehicles(&self, t: f64) -> Vec<VehicleId> {
        self.vehicles
            .iter()
            .filter(|v| self.role(v.id, t) == Role::TaskVehicle)
            .filter(|v| self.serving_rsu(v.id, t).is_ok())
            .map(|v| v.id)
            .collect()
    }

    /// SeVs in coverage of `rsu` whose SINR clears the threshold, without
    /// `exclude`, sorted by id.
    pub fn available_sevs(&self, rsu: usize, t: f64, exclude: VehicleId) -> Vec<VehicleId> {
        let tt = self.trace_time(t);
        let radio = &self.params.radio;
        self.vehicles
            .iter()
            .filter(|v| v.id != exclude && self.roles.role(v.id, tt) == Role::ServerVehicle)
            .filter(|v| {
                v.position(tt)
                    .filter(|&p| self.rsus.covers(rsu, p))
                    .is_some_and(|p| radio.reachable(p.distance(self.rsus.positions[rsu])))
            })
            .map(|v| v.id)
            .collect()
    }

    fn link_rate(&self, rsu: usize, p: super::Point) -> f64 {
        let radio = &self.params.radio;
        shannon_rate(radio, radio.sinr_at(p.distance(self.rsus.positions[rsu])))
    }

    /// Deterministic delay segments of replicating `task` on `sev` via
    /// `rsu`, and whether the result has to be relayed.
    pub fn delay_plan(&self, task: &Task, sev: VehicleId, rsu: usize) -> Result<DelayPlan, EnvError> {
        let radio = &self.params.radio;
        let server = self.vehicle(sev)?;
        let uplink = self.link_rate(rsu, self.position(task.tav, task.arrival_time)?);
        let tr = task.x_bits / uplink;
        let rs = task.x_bits / radio.downlink_rate_bps;
        let c = task.w_cycles / server.cpu_hz;
        let done = task.arrival_time + tr + rs + c;
        let sev_pos = self.position(sev, done)?;
        let s_rsu = self.serving_rsu(sev, done)?;
        let t_rsu = self.serving_rsu(task.tav, done)?;
        let base = DelayBreakdown {
            tr,
            rs,
            c,
            sr: task.y_bits / self.link_rate(s_rsu, sev_pos),
            rr: 0.0,
            rt: task.y_bits / radio.downlink_rate_bps,
        };
        Ok(DelayPlan { base, relay: s_rsu != t_rsu, result_bits: task.y_bits })
    }

    pub fn service_delay<R: rand::Rng + ?Sized>(
        &self,
        task: &Task,
        sev: VehicleId,
        rsu: usize,
        rng: &mut R,
    ) -> Result<DelayBreakdown, EnvError> {
        Ok(self.delay_plan(task, sev, rsu)?.sample(&self.params.radio, rng))
    }

    /// `(TaV speed, SeV speed, distance, deadline)`, normalized.
    pub fn context_of(&self, task: &Task, sev: VehicleId, t: f64) -> Result<ContextVector, EnvError> {
        let distance = self.position(task.tav, t)?.distance(self.position(sev, t)?);
        Ok(self.params.context.vector(self.speed(task.tav, t)?, self.speed(sev, t)?, distance, task.deadline))
    }

    /// Up to `horizon` tasks for `seed`, stopping when the traces run out.
    /// True qualities come from [`MONTE_CARLO_SAMPLES`] backhaul resamples.
    pub fn episode(&self, tasks: &TaskParams, horizon: usize, seed: u64) -> Result<Episode, EnvError> {
        let errors = tasks.validate();
        if !errors.is_empty() {
            return Err(EnvError::InvalidArgument(errors.join("; ")));
        }
        let end = self.end_time;
        let arrivals = PoissonArrivals::new(tasks.arrival_rate, stream_rng(seed, 1))?;
        let mut rng = stream_rng(seed, 2);
        let mut mc = stream_rng(seed, 3);
        let mut dropped = Vec::new();
        let stream = generate_tasks(
            arrivals.take_while(|&t| t <= end),
            horizon,
            usize::MAX,
            tasks,
            &mut rng,
            |t, rng| {
                let tavs = self.task_vehicles(t);
                if tavs.is_empty() {
                    dropped.push(t);
                    None
                } else {
                    Some(tavs[rand::Rng::random_range(rng, 0..tavs.len())])
                }
            },
        );
        let radio = &self.params.radio;
        let mut rounds = Vec::with_capacity(stream.tasks.len());
        for task in stream.tasks {
            let t = task.arrival_time;
            let rsu = self.serving_rsu(task.tav, t)?;
            let mut candidates = Vec::new();
            for sev in self.available_sevs(rsu, t, task.tav) {
                let context = self.context_of(&task, sev, t)?;
                let (mu, delay) = match self.delay_plan(&task, sev, rsu) {
                    Ok(plan) => (
                        plan.success_probability(radio, task.deadline, MONTE_CARLO_SAMPLES, &mut mc),
                        plan.sample(radio, &mut rng).total(),
                    ),
                    Err(_) => (0.0, f64::INFINITY),
                };
                candidates.push(Candidate {
                    id: CandidateId(sev.0),
                    sev,
                    context,
                    mu,
                    delay,
                    quality: u8::from(delay <= task.deadline),
                });
            }
            rounds.push(Round { task, candidates });
        }
        Ok(Episode { rounds, dropped, context_dim: Self::CONTEXT_DIM })
    }
}
