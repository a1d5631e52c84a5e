//! `datev` command line: run experiments, summarize their output and check
//! configuration files.

use std::fs::File;
use std::io::{self, BufWriter};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use datev::bench::{run_experiment, summarize_dir, write_experiment, write_summary, BenchError, Mode, RunConfig, SummaryRow};

#[derive(Parser)]
#[command(name = "datev", version, about = "Deadline-aware task replication experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every configured policy over every seed and write CSV output.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Output directory; defaults to `output_dir` from the config.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Replaces the configured seeds, e.g. `1,2,3`.
        #[arg(long, value_delimiter = ',')]
        seeds: Option<Vec<u64>>,
        #[arg(long, value_parser = parse_mode)]
        mode: Option<Mode>,
    },
    /// Recompute `summary.csv` from the episode files of a run.
    Summarize {
        #[arg(long = "in")]
        input: PathBuf,
        /// Sliding-window length for the final-window averages.
        #[arg(long, default_value_t = 2000)]
        window: usize,
    },
    /// Parse a config file and list every problem with it.
    ValidateConfig {
        #[arg(long)]
        config: PathBuf,
    },
}

fn parse_mode(s: &str) -> Result<Mode, String> {
    Mode::parse(s).ok_or_else(|| format!("unknown mode {s:?}; expected synthetic or trace"))
}

fn print_rows(rows: &[SummaryRow]) {
    println!(
        "{:<8} {:>5} {:>7} {:>12} {:>12} {:>11} {:>8} {:>8}",
        "policy", "seed", "tasks", "cum_reward", "cum_regret", "window_avg", "misexp", "dropped"
    );
    for r in rows {
        println!(
            "{:<8} {:>5} {:>7} {:>12.2} {:>12.2} {:>11.4} {:>8} {:>8}",
            r.policy.as_str(),
            r.seed,
            r.tasks,
            r.cum_reward,
            r.cum_regret,
            r.final_window_reward,
            r.misexploitation,
            r.dropped
        );
    }
}

fn report_config_errors(err: &BenchError) -> bool {
    if let BenchError::Config(list) = err {
        for e in list {
            eprintln!("  - {e}");
        }
        true
    } else {
        false
    }
}

fn run(config: PathBuf, out: Option<PathBuf>, seeds: Option<Vec<u64>>, mode: Option<Mode>) -> Result<()> {
    let mut cfg = RunConfig::read(&config).with_context(|| format!("reading {}", config.display()))?;
    if let Some(seeds) = seeds {
        cfg.seeds = seeds;
    }
    if let Some(mode) = mode {
        cfg.mode = mode;
    }
    if let Err(e) = cfg.validate() {
        eprintln!("{}: invalid configuration", config.display());
        report_config_errors(&e);
        bail!("configuration rejected");
    }
    let Some(dir) = out.or_else(|| cfg.output_dir.clone()) else {
        bail!("no output directory: pass --out or set output_dir");
    };
    let started = Instant::now();
    let exp = run_experiment(&cfg)?;
    write_experiment(&dir, &exp, &cfg).with_context(|| format!("writing {}", dir.display()))?;
    print_rows(&exp.summary(cfg.window));
    eprintln!(
        "{} runs in {:.1} s, output in {}",
        exp.runs.len(),
        started.elapsed().as_secs_f64(),
        dir.display()
    );
    Ok(())
}

fn summarize(input: PathBuf, window: usize) -> Result<()> {
    let rows = summarize_dir(&input, window)?;
    let path = input.join("summary.csv");
    let file = File::create(&path).with_context(|| format!("writing {}", path.display()))?;
    write_summary(&rows, BufWriter::new(file))?;
    print_rows(&rows);
    Ok(())
}

fn validate(config: PathBuf) -> Result<()> {
    match RunConfig::load(&config) {
        Ok(cfg) => {
            let learner = cfg.learner_config()?;
            println!(
                "{}: ok ({:?} mode, T = {}, {} seeds, {} policies, h_T = {})",
                config.display(),
                cfg.mode,
                cfg.horizon,
                cfg.seeds.len(),
                cfg.policies.len(),
                learner.cells_per_dim()
            );
            Ok(())
        }
        Err(e) => {
            eprintln!("{}: invalid configuration", config.display());
            if !report_config_errors(&e) {
                eprintln!("  - {e}");
            }
            bail!("configuration rejected");
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run { config, out, seeds, mode } => run(config, out, seeds, mode),
        Command::Summarize { input, window } => summarize(input, window),
        Command::ValidateConfig { config } => validate(config),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let _ = io::Write::flush(&mut io::stdout());
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
