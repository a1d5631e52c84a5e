use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{BenchError, EpisodeRecord, Experiment, RunConfig};
use crate::baselines::PolicyKind;
use crate::reward::Phase;

pub const EPISODE_HEADER: &str =
    "task_id,policy,phase,k,reward,oracle_u,policy_u,regret,cum_regret,misexploit,sim_time";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub policy: PolicyKind,
    pub seed: u64,
    pub tasks: usize,
    pub cum_reward: f64,
    pub cum_expected_reward: f64,
    pub mean_reward: f64,
    /// Mean realized reward over the last `window` tasks.
    pub final_window_reward: f64,
    /// Mean expected reward over the last `window` tasks.
    pub final_window_expected: f64,
    pub cum_regret: f64,
    pub exploration: usize,
    pub semi_exploration: usize,
    pub exploitation: usize,
    pub misexploitation: usize,
    pub dropped: usize,
}

fn mean(xs: impl ExactSizeIterator<Item = f64>) -> f64 {
    let n = xs.len();
    if n == 0 {
        0.0
    } else {
        xs.sum::<f64>() / n as f64
    }
}

impl SummaryRow {
    pub fn from_records(policy: PolicyKind, seed: u64, records: &[EpisodeRecord], dropped: usize, window: usize) -> Self {
        let tail = &records[records.len().saturating_sub(window)..];
        let phase_count = |p: Phase| records.iter().filter(|r| r.phase == p).count();
        Self {
            policy,
            seed,
            tasks: records.len(),
            cum_reward: records.iter().map(|r| r.reward).sum(),
            cum_expected_reward: records.iter().map(|r| r.policy_u).sum(),
            mean_reward: mean(records.iter().map(|r| r.reward)),
            final_window_reward: mean(tail.iter().map(|r| r.reward)),
            final_window_expected: mean(tail.iter().map(|r| r.policy_u)),
            cum_regret: records.last().map_or(0.0, |r| r.cum_regret),
            exploration: phase_count(Phase::Exploration),
            semi_exploration: phase_count(Phase::SemiExploration),
            exploitation: phase_count(Phase::Exploitation),
            misexploitation: records.iter().filter(|r| r.misexploit).count(),
            dropped,
        }
    }
}

fn io_err(path: &Path, e: io::Error) -> BenchError {
    BenchError::Io(format!("{}: {e}", path.display()))
}

fn create(path: &Path) -> Result<BufWriter<File>, BenchError> {
    File::create(path).map(BufWriter::new).map_err(|e| io_err(path, e))
}

pub fn write_episode_csv<W: Write>(records: &[EpisodeRecord], out: W) -> Result<(), BenchError> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(EPISODE_HEADER.split(','))?;
    for r in records {
        w.serialize(r)?;
    }
    w.flush().map_err(|e| BenchError::Io(e.to_string()))?;
    Ok(())
}

pub fn read_episode_csv(path: &Path) -> Result<Vec<EpisodeRecord>, BenchError> {
    let mut reader = csv::Reader::from_path(path)?;
    let header: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
    if header.join(",") != EPISODE_HEADER {
        return Err(BenchError::Io(format!("{}: unexpected header {}", path.display(), header.join(","))));
    }
    Ok(reader.deserialize().collect::<Result<_, _>>()?)
}

pub fn write_summary<W: Write>(rows: &[SummaryRow], out: W) -> Result<(), BenchError> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush().map_err(|e| BenchError::Io(e.to_string()))?;
    Ok(())
}

/// Regret and window-average samples at about `points` evenly spaced tasks.
pub fn write_curves<W: Write>(exp: &Experiment, window: usize, points: usize, out: W) -> Result<(), BenchError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["policy", "seed", "t", "cum_regret", "window_reward"])?;
    for run in &exp.runs {
        let n = run.records.len();
        let step = (n / points.max(1)).max(1);
        let mut sum = 0.0;
        for (i, r) in run.records.iter().enumerate() {
            sum += r.reward;
            if i >= window {
                sum -= run.records[i - window].reward;
            }
            if (i + 1) % step == 0 || i + 1 == n {
                let width = (i + 1).min(window) as f64;
                w.write_record([
                    run.policy.to_string(),
                    run.seed.to_string(),
                    (i + 1).to_string(),
                    r.cum_regret.to_string(),
                    (sum / width).to_string(),
                ])?;
            }
        }
    }
    w.flush().map_err(|e| BenchError::Io(e.to_string()))?;
    Ok(())
}

fn dropped_by_seed(exp: &Experiment) -> BTreeMap<u64, &[f64]> {
    exp.runs.iter().map(|r| (r.seed, r.dropped.as_slice())).collect()
}

/// Writes `episodes_<policy>_<seed>.csv`, `summary.csv`, `curves.csv` and
/// `dropped.csv` into `dir`.
pub fn write_experiment(dir: &Path, exp: &Experiment, config: &RunConfig) -> Result<(), BenchError> {
    fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    for run in &exp.runs {
        let path = dir.join(format!("episodes_{}_{}.csv", run.policy, run.seed));
        write_episode_csv(&run.records, create(&path)?)?;
    }
    write_summary(&exp.summary(config.window), create(&dir.join("summary.csv"))?)?;
    write_curves(exp, config.window, 200, create(&dir.join("curves.csv"))?)?;
    let mut w = csv::Writer::from_writer(create(&dir.join("dropped.csv"))?);
    w.write_record(["seed", "arrival_time"])?;
    for (seed, times) in dropped_by_seed(exp) {
        for t in times {
            w.write_record([seed.to_string(), t.to_string()])?;
        }
    }
    w.flush().map_err(|e| BenchError::Io(e.to_string()))?;
    Ok(())
}

fn parse_episode_name(name: &str) -> Option<(PolicyKind, u64)> {
    let stem = name.strip_prefix("episodes_")?.strip_suffix(".csv")?;
    let (policy, seed) = stem.rsplit_once('_')?;
    Some((PolicyKind::parse(policy)?, seed.parse().ok()?))
}

/// Recomputes the summary table from the episode files in `dir`.
pub fn summarize_dir(dir: &Path, window: usize) -> Result<Vec<SummaryRow>, BenchError> {
    let mut dropped: BTreeMap<u64, usize> = BTreeMap::new();
    let dropped_path = dir.join("dropped.csv");
    if dropped_path.exists() {
        let mut reader = csv::Reader::from_path(&dropped_path)?;
        for row in reader.deserialize::<(u64, f64)>() {
            *dropped.entry(row?.0).or_default() += 1;
        }
    }
    let mut found = Vec::new();
    for entry in fs::read_dir(dir).map_err(|e| io_err(dir, e))? {
        let entry = entry.map_err(|e| io_err(dir, e))?;
        if let Some(key) = entry.file_name().to_str().and_then(parse_episode_name) {
            found.push((key, entry.path()));
        }
    }
    if found.is_empty() {
        return Err(BenchError::NoRecords(dir.display().to_string()));
    }
    found.sort_by_key(|&((p, s), _)| (s, p));
    found
        .into_iter()
        .map(|((policy, seed), path)| {
            let records = read_episode_csv(&path)?;
            Ok(SummaryRow::from_records(policy, seed, &records, dropped.get(&seed).copied().unwrap_or(0), window))
        })
        .collect()
}
