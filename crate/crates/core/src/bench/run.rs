use std::fs::File;
use std::io::BufReader;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{output::SummaryRow, BenchError, Mode, RsuPlacement, RunConfig};
use crate::baselines::{DateVPolicy, MLinUcb, Observation, Oracle, Policy, PolicyKind, RandomPolicy, Ucb};
use crate::ccmab::{FeedbackQueue, LearnerConfig};
use crate::env::{Episode, Point, SyntheticWorld, World, WorldParams};
use crate::ids::TaskId;
use crate::reward::{expected_reward, greedy_select, realized_reward, Phase, RewardParams};
use crate::trace::{self, FleetOptions};
use crate::{stream_rng, SimRng};

/// One task as seen by one policy.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpisodeRecord {
    pub task_id: TaskId,
    pub policy: PolicyKind,
    pub phase: Phase,
    /// Number of selected replications.
    pub k: usize,
    /// Realized reward.
    pub reward: f64,
    pub oracle_u: f64,
    pub policy_u: f64,
    pub regret: f64,
    pub cum_regret: f64,
    pub misexploit: bool,
    pub sim_time: f64,
    /// Decision latency, seconds; not part of the CSV output.
    #[serde(skip)]
    pub wall_clock_s: f64,
}

pub enum Environment {
    Synthetic(SyntheticWorld),
    Trace(World),
}

impl Environment {
    pub fn episode(&self, config: &RunConfig, seed: u64) -> Result<Episode, BenchError> {
        let horizon = config.horizon as usize;
        Ok(match self {
            Environment::Synthetic(w) => w.episode(horizon, seed),
            Environment::Trace(w) => w.episode(&config.tasks, horizon, seed)?,
        })
    }
}

fn trace_world(config: &RunConfig) -> Result<World, BenchError> {
    let t = &config.trace;
    let opts = FleetOptions {
        region: t.region,
        max_gap_s: t.max_gap_s,
        cpu_hz: (t.cpu_ghz.0 * 1e9, t.cpu_ghz.1 * 1e9),
        seed: t.world_seed,
    };
    let vehicles = match (&t.manifest, &t.canonical) {
        (Some(m), _) => trace::load_fleet(m, &opts)?,
        (None, Some(c)) => {
            let file = File::open(c).map_err(|e| BenchError::Io(format!("{}: {e}", c.display())))?;
            trace::read_canonical(BufReader::new(file), &opts)?
        }
        (None, None) => return Err(BenchError::Config(vec!["no trace source".into()])),
    };
    let rsus = match t.rsu_placement {
        RsuPlacement::LongAxis => trace::deploy_rsus(&t.region, t.rsu_spacing_m, t.rsu_count, t.coverage_m)?,
        RsuPlacement::Density => {
            let samples: Vec<Point> = vehicles
                .iter()
                .flat_map(|v| v.segments.iter().flat_map(|s| s.samples().map(|(_, p)| p)))
                .collect();
            trace::deploy_rsus_along_density(&samples, t.rsu_spacing_m, t.rsu_count, t.coverage_m)?
        }
    };
    let params = WorldParams {
        radio: config.radio.params(),
        context: config.context.clone(),
        sev_fraction: t.sev_fraction,
        role_epoch_s: t.role_epoch_s,
        role_seed: t.world_seed,
    };
    Ok(World::new(vehicles, rsus, params, t.start_time)?)
}

pub fn build_environment(config: &RunConfig) -> Result<Environment, BenchError> {
    config.validate()?;
    Ok(match config.mode {
        Mode::Synthetic => Environment::Synthetic(SyntheticWorld::new(config.synthetic.clone(), config.tasks.clone())?),
        Mode::Trace => Environment::Trace(trace_world(config)?),
    })
}

pub fn make_policy(kind: PolicyKind, config: &RunConfig, learner: &LearnerConfig) -> Result<Box<dyn Policy>, BenchError> {
    Ok(match kind {
        PolicyKind::Datev => Box::new(DateVPolicy::new(learner.clone())?),
        PolicyKind::Oracle => Box::new(Oracle::new(learner.reward)),
        PolicyKind::Ucb => Box::new(Ucb::new(config.baselines.ucb_arm_key)),
        PolicyKind::Mlinucb => Box::new(MLinUcb::new(config.mode.context_dim(), config.baselines.mlinucb_alpha)),
        PolicyKind::Random => Box::new(RandomPolicy),
    })
}

fn deliver(policy: &mut dyn Policy, events: Vec<Observation>) -> Result<(), BenchError> {
    for obs in events {
        policy.observe(&obs)?;
    }
    Ok(())
}

/// Plays `policy` through `episode`. Before each decision the feedback
/// visible at the task's arrival is delivered; without delay every
/// observation is delivered right after its decision. Pending feedback is
/// flushed at the end.
pub fn run_policy(
    episode: &Episode,
    kind: PolicyKind,
    policy: &mut dyn Policy,
    params: RewardParams,
    delayed: bool,
    rng: &mut SimRng,
) -> Result<Vec<EpisodeRecord>, BenchError> {
    let mut queue: FeedbackQueue<Observation> = FeedbackQueue::new();
    let mut records = Vec::with_capacity(episode.len());
    let mut cum_regret = 0.0;
    for (i, round) in episode.rounds.iter().enumerate() {
        let t = i as u64 + 1;
        let now = round.task.arrival_time;
        if delayed {
            deliver(policy, queue.drain_ready(now))?;
        }
        let started = Instant::now();
        let out = policy.select(round, t, rng)?;
        let wall_clock_s = started.elapsed().as_secs_f64();
        let mut selected = out.decision.selected;
        if selected.len() > round.task.budget {
            return Err(BenchError::BudgetExceeded {
                policy: kind.to_string(),
                selected: selected.len(),
                budget: round.task.budget,
            });
        }
        selected.sort_unstable();

        let mu = round.true_mu();
        let ids: Vec<_> = round.candidates.iter().map(|c| c.id).collect();
        let mut best = if ids.is_empty() { Vec::new() } else { greedy_select(&mu, &ids, round.task.budget, params)? };
        best.sort_unstable();
        let oracle_u = expected_reward(&mu, &best, params)?;
        let policy_u = expected_reward(&mu, &selected, params)?;

        let mut qualities = Vec::with_capacity(selected.len());
        for &id in &selected {
            let c = round.candidate(id).expect("policies select offered candidates");
            qualities.push(c.quality);
            queue.push(Observation {
                task_id: round.task.id,
                candidate: id,
                sev: c.sev,
                tav: round.task.tav,
                context: c.context.clone(),
                quality: c.quality,
                ready_time: round.ready_time(c),
            });
        }
        if !delayed {
            deliver(policy, queue.drain_all())?;
        }
        let regret = oracle_u - policy_u;
        cum_regret += regret;
        records.push(EpisodeRecord {
            task_id: round.task.id,
            policy: kind,
            phase: out.decision.phase,
            k: selected.len(),
            reward: realized_reward(&qualities, params)?,
            oracle_u,
            policy_u,
            regret,
            cum_regret,
            misexploit: out.misexploitation,
            sim_time: now,
            wall_clock_s,
        });
    }
    deliver(policy, queue.drain_all())?;
    Ok(records)
}

#[derive(Clone, Debug)]
pub struct PolicyRun {
    pub policy: PolicyKind,
    pub seed: u64,
    pub records: Vec<EpisodeRecord>,
    /// Arrival times dropped for lack of a TaV.
    pub dropped: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct Experiment {
    /// Ordered by seed, then by the configured policy order.
    pub runs: Vec<PolicyRun>,
}

impl Experiment {
    pub fn run(&self, policy: PolicyKind, seed: u64) -> Option<&PolicyRun> {
        self.runs.iter().find(|r| r.policy == policy && r.seed == seed)
    }

    pub fn runs_of(&self, policy: PolicyKind) -> impl Iterator<Item = &PolicyRun> {
        self.runs.iter().filter(move |r| r.policy == policy)
    }

    pub fn summary(&self, window: usize) -> Vec<SummaryRow> {
        self.runs.iter().map(|r| summarize(r, window)).collect()
    }
}

fn policy_stream(kind: PolicyKind) -> u64 {
    16 + PolicyKind::ALL.iter().position(|&k| k == kind).expect("listed kind") as u64
}

/// Runs every (seed, policy) pair; seeds and policies fan out over the
/// rayon pool and each worker owns its policy instance.
pub fn run_experiment(config: &RunConfig) -> Result<Experiment, BenchError> {
    let env = build_environment(config)?;
    run_experiment_in(&env, config)
}

impl Environment {
    pub fn run(&self, config: &RunConfig) -> Result<Experiment, BenchError> {
        run_experiment_in(self, config)
    }
}

fn run_experiment_in(env: &Environment, config: &RunConfig) -> Result<Experiment, BenchError> {
    config.validate()?;
    let learner = config.learner_config()?;
    let per_seed = config
        .seeds
        .par_iter()
        .map(|&seed| {
            let episode = env.episode(config, seed)?;
            config
                .policies
                .par_iter()
                .map(|&kind| {
                    let mut policy = make_policy(kind, config, &learner)?;
                    let mut rng = stream_rng(seed, policy_stream(kind));
                    let records =
                        run_policy(&episode, kind, policy.as_mut(), learner.reward, config.delayed_feedback, &mut rng)?;
                    Ok(PolicyRun { policy: kind, seed, records, dropped: episode.dropped.clone() })
                })
                .collect::<Result<Vec<_>, BenchError>>()
        })
        .collect::<Result<Vec<_>, BenchError>>()?;
    Ok(Experiment { runs: per_seed.into_iter().flatten().collect() })
}

/// Per-run totals, window averages and phase counts.
pub fn summarize(run: &PolicyRun, window: usize) -> SummaryRow {
    SummaryRow::from_records(run.policy, run.seed, &run.records, run.dropped.len(), window)
}
