//! Experiment orchestration: seeded runs of every configured policy on a
//! common task stream, regret accounting and CSV output.

mod config;
mod output;
mod run;

use thiserror::Error;

pub use config::{BaselineSection, LearnerSection, Mode, RadioSection, RsuPlacement, RunConfig, TraceSection};
pub use output::{
    read_episode_csv, summarize_dir, write_curves, write_episode_csv, write_experiment, write_summary,
    SummaryRow, EPISODE_HEADER,
};
pub use run::{
    build_environment, make_policy, run_experiment, run_policy, summarize, Environment, EpisodeRecord,
    Experiment, PolicyRun,
};

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("invalid configuration:\n  - {}", .0.join("\n  - "))]
    Config(Vec<String>),
    #[error("{0}")]
    Io(String),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Env(#[from] crate::env::EnvError),
    #[error(transparent)]
    Trace(#[from] crate::trace::TraceError),
    #[error(transparent)]
    Policy(#[from] crate::baselines::PolicyError),
    #[error(transparent)]
    Reward(#[from] crate::reward::RewardError),
    #[error("policy {policy} selected {selected} replications with budget {budget}")]
    BudgetExceeded { policy: String, selected: usize, budget: usize },
    #[error("no episode files found in {0}")]
    NoRecords(String),
}
