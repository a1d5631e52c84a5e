use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;

use datev::baselines::{Observation, Policy, PolicyError, PolicyKind, PolicyOutput, RandomPolicy};
use datev::bench::{
    build_environment, read_episode_csv, run_experiment, run_policy, summarize_dir, write_experiment, BenchError,
    Mode, RunConfig,
};
use datev::env::Round;
use datev::reward::{Phase, ReplicationDecision, RewardParams};
use datev::{stream_rng, SimRng};

fn small(horizon: u64, seeds: Vec<u64>) -> RunConfig {
    RunConfig::new(Mode::Synthetic, horizon, seeds)
}

#[test]
fn policies_share_the_episode_of_a_seed() {
    let exp = run_experiment(&small(500, vec![3, 4])).unwrap();
    for seed in [3, 4] {
        let oracle = &exp.run(PolicyKind::Oracle, seed).unwrap().records;
        for kind in PolicyKind::ALL {
            let run = &exp.run(kind, seed).unwrap().records;
            let a: Vec<_> = run.iter().map(|r| (r.task_id, r.oracle_u, r.sim_time)).collect();
            let b: Vec<_> = oracle.iter().map(|r| (r.task_id, r.oracle_u, r.sim_time)).collect();
            assert_eq!(a, b, "{kind}");
        }
    }
    let s3 = &exp.run(PolicyKind::Oracle, 3).unwrap().records;
    let s4 = &exp.run(PolicyKind::Oracle, 4).unwrap().records;
    assert_ne!(s3[0].sim_time, s4[0].sim_time);
}

#[test]
fn oracle_has_zero_regret_and_records_add_up() {
    let exp = run_experiment(&small(800, vec![1])).unwrap();
    assert!(exp.run(PolicyKind::Oracle, 1).unwrap().records.iter().all(|r| r.regret.abs() < 1e-12));
    for run in &exp.runs {
        let mut total = 0.0;
        for r in &run.records {
            assert!(r.regret >= -1e-12);
            assert!((r.regret - (r.oracle_u - r.policy_u)).abs() < 1e-12);
            total += r.regret;
            assert!((r.cum_regret - total).abs() < 1e-9);
        }
        assert_eq!(run.records.len(), 800);
    }
}

#[test]
fn runs_are_deterministic() {
    let config = small(400, vec![5, 6]);
    let a = run_experiment(&config).unwrap();
    let b = run_experiment(&config).unwrap();
    for (x, y) in a.runs.iter().zip(&b.runs) {
        let strip = |r: &datev::bench::EpisodeRecord| {
            let mut r = r.clone();
            r.wall_clock_s = 0.0;
            r
        };
        let xs: Vec<_> = x.records.iter().map(strip).collect();
        let ys: Vec<_> = y.records.iter().map(strip).collect();
        assert_eq!(xs, ys);
    }
}

struct Counting {
    inner: RandomPolicy,
    selected: Arc<AtomicUsize>,
    observed: Arc<AtomicUsize>,
}

impl Policy for Counting {
    fn name(&self) -> &'static str {
        "counting"
    }

    fn select(&mut self, round: &Round, t: u64, rng: &mut SimRng) -> Result<PolicyOutput, PolicyError> {
        let out = self.inner.select(round, t, rng)?;
        self.selected.fetch_add(out.decision.selected.len(), Ordering::Relaxed);
        Ok(out)
    }

    fn observe(&mut self, obs: &Observation) -> Result<(), PolicyError> {
        self.observed.fetch_add(1, Ordering::Relaxed);
        self.inner.observe(obs)
    }
}

#[test]
fn every_selection_is_observed_exactly_once() {
    let config = small(1000, vec![2]);
    let env = build_environment(&config).unwrap();
    let episode = env.episode(&config, 2).unwrap();
    for delayed in [true, false] {
        let selected = Arc::new(AtomicUsize::new(0));
        let observed = Arc::new(AtomicUsize::new(0));
        let mut policy = Counting { inner: RandomPolicy, selected: selected.clone(), observed: observed.clone() };
        let mut rng = stream_rng(2, 99);
        let records =
            run_policy(&episode, PolicyKind::Random, &mut policy, RewardParams::new(0.1).unwrap(), delayed, &mut rng)
                .unwrap();
        let k: usize = records.iter().map(|r| r.k).sum();
        assert_eq!(selected.load(Ordering::Relaxed), k);
        assert_eq!(observed.load(Ordering::Relaxed), k);
    }
}

struct Greedy;

impl Policy for Greedy {
    fn name(&self) -> &'static str {
        "greedy"
    }

    fn select(&mut self, round: &Round, _: u64, _: &mut SimRng) -> Result<PolicyOutput, PolicyError> {
        Ok(PolicyOutput {
            decision: ReplicationDecision {
                task_id: round.task.id,
                selected: round.candidates.iter().map(|c| c.id).collect(),
                phase: Phase::Oracle,
            },
            misexploitation: false,
        })
    }

    fn observe(&mut self, _: &Observation) -> Result<(), PolicyError> {
        Ok(())
    }
}

#[test]
fn over_budget_decisions_are_rejected() {
    let config = small(50, vec![1]);
    let env = build_environment(&config).unwrap();
    let episode = env.episode(&config, 1).unwrap();
    let err = run_policy(&episode, PolicyKind::Random, &mut Greedy, RewardParams::new(0.1).unwrap(), true, &mut stream_rng(1, 0))
        .unwrap_err();
    assert!(matches!(err, BenchError::BudgetExceeded { .. }), "{err}");
}

#[test]
fn csv_output_round_trips() {
    let config = small(300, vec![1, 2]);
    let exp = run_experiment(&config).unwrap();
    let dir = tempfile::tempdir().unwrap();
    write_experiment(dir.path(), &exp, &config).unwrap();
    for run in &exp.runs {
        let path = dir.path().join(format!("episodes_{}_{}.csv", run.policy, run.seed));
        let back = read_episode_csv(&path).unwrap();
        assert_eq!(back.len(), run.records.len());
        for (a, b) in back.iter().zip(&run.records) {
            assert_eq!((a.task_id, a.policy, a.phase, a.k, a.misexploit), (b.task_id, b.policy, b.phase, b.k, b.misexploit));
            assert!((a.cum_regret - b.cum_regret).abs() < 1e-9);
        }
    }
    for f in ["summary.csv", "curves.csv", "dropped.csv"] {
        assert!(dir.path().join(f).exists(), "{f}");
    }
    let rows = summarize_dir(dir.path(), config.window).unwrap();
    assert_eq!(rows, exp.summary(config.window));
    let header = std::fs::read_to_string(dir.path().join("episodes_datev_1.csv")).unwrap();
    assert!(header.starts_with("task_id,policy,phase,k,reward,oracle_u,policy_u,regret,cum_regret,misexploit,sim_time\n"));
}

#[test]
fn config_validation_reports_every_problem() {
    let text = r#"
        mode = "synthetic"
        horizon = 0
        seeds = []
        [learner]
        alpha = 1.5
        eta = 1.0
    "#;
    let config = RunConfig::from_toml_str(text).unwrap();
    let errors = config.violations();
    assert_eq!(errors.len(), 4, "{errors:?}");
    match config.validate() {
        Err(BenchError::Config(list)) => assert_eq!(list, errors),
        other => panic!("{other:?}"),
    }
}

#[test]
fn config_rejects_unknown_keys_and_accepts_minimal_files() {
    assert!(RunConfig::from_toml_str("mode = \"synthetic\"\nhorizon = 10\nseeds = [1]\nhorizn = 3\n").is_err());
    assert!(RunConfig::from_toml_str("mode = \"synthetic\"\nhorizon = 10\nseeds = [1]\n[learner]\nalfa = 1\n").is_err());
    let c = RunConfig::from_toml_str("mode = \"synthetic\"\nhorizon = 10\nseeds = [1]\n").unwrap();
    assert_eq!(c, small(10, vec![1]));
    c.validate().unwrap();
}

#[test]
fn trace_mode_without_a_source_is_invalid() {
    let c = RunConfig::new(Mode::Trace, 10, vec![1]);
    assert!(c.violations().iter().any(|e| e.contains("trace.manifest")));
}
