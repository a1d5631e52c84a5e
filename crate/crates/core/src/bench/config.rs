//! Run configuration, loaded from TOML. Unknown keys are rejected and
//! validation reports every violation at once.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::BenchError;
use crate::baselines::{PolicyKind, UcbArmKey};
use crate::ccmab::LearnerConfig;
use crate::env::{dbm_to_watts, ContextBounds, RadioParams, SyntheticParams, SyntheticWorld, TaskParams, World};
use crate::trace::RegionSpec;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Synthetic,
    Trace,
}

impl Mode {
    pub fn context_dim(self) -> usize {
        match self {
            Mode::Synthetic => SyntheticWorld::CONTEXT_DIM,
            Mode::Trace => World::CONTEXT_DIM,
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "synthetic" => Some(Mode::Synthetic),
            "trace" => Some(Mode::Trace),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LearnerSection {
    pub alpha: f64,
    pub eta: f64,
    /// Context dimension; must equal the mode's when given.
    pub dim: Option<usize>,
}

impl Default for LearnerSection {
    fn default() -> Self {
        Self { alpha: 1.0, eta: 0.1, dim: None }
    }
}

/// Radio parameters with powers in dBm.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RadioSection {
    pub tx_power_dbm: f64,
    pub noise_dbm: f64,
    pub interference_w: f64,
    pub path_loss_exponent: f64,
    pub sinr_threshold: f64,
    pub bandwidth_hz: f64,
    pub downlink_rate_bps: f64,
    pub backhaul_rate_bps: (f64, f64),
    pub backhaul_rtt_s: (f64, f64),
    pub min_distance_m: f64,
}

impl Default for RadioSection {
    fn default() -> Self {
        let r = RadioParams::default();
        Self {
            tx_power_dbm: 10.0,
            noise_dbm: -172.0,
            interference_w: r.interference_w,
            path_loss_exponent: r.path_loss_exponent,
            sinr_threshold: r.sinr_threshold,
            bandwidth_hz: r.bandwidth_hz,
            downlink_rate_bps: r.downlink_rate_bps,
            backhaul_rate_bps: r.backhaul_rate_bps,
            backhaul_rtt_s: r.backhaul_rtt_s,
            min_distance_m: r.min_distance_m,
        }
    }
}

impl RadioSection {
    pub fn params(&self) -> RadioParams {
        RadioParams {
            tx_power_w: dbm_to_watts(self.tx_power_dbm),
            path_loss_exponent: self.path_loss_exponent,
            noise_w: dbm_to_watts(self.noise_dbm),
            interference_w: self.interference_w,
            sinr_threshold: self.sinr_threshold,
            bandwidth_hz: self.bandwidth_hz,
            downlink_rate_bps: self.downlink_rate_bps,
            backhaul_rate_bps: self.backhaul_rate_bps,
            backhaul_rtt_s: self.backhaul_rtt_s,
            min_distance_m: self.min_distance_m,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RsuPlacement {
    #[default]
    LongAxis,
    Density,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TraceSection {
    /// Manifest of raw trace files.
    pub manifest: Option<PathBuf>,
    /// Canonical `vehicle_id,t,x_m,y_m` file, used instead of a manifest.
    pub canonical: Option<PathBuf>,
    pub region: RegionSpec,
    /// Trace time of simulated time 0; the earliest sample when unset.
    pub start_time: Option<f64>,
    pub max_gap_s: f64,
    pub cpu_ghz: (f64, f64),
    pub rsu_count: usize,
    pub rsu_spacing_m: f64,
    pub coverage_m: f64,
    pub rsu_placement: RsuPlacement,
    pub sev_fraction: f64,
    pub role_epoch_s: Option<f64>,
    /// Seed of CPU frequencies and roles, shared by all run seeds.
    pub world_seed: u64,
}

impl Default for TraceSection {
    fn default() -> Self {
        Self {
            manifest: None,
            canonical: None,
            region: RegionSpec::default(),
            start_time: None,
            max_gap_s: 120.0,
            cpu_ghz: (2.0, 8.0),
            rsu_count: 12,
            rsu_spacing_m: 200.0,
            coverage_m: 300.0,
            rsu_placement: RsuPlacement::LongAxis,
            sev_fraction: 0.5,
            role_epoch_s: None,
            world_seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BaselineSection {
    pub ucb_arm_key: UcbArmKey,
    pub mlinucb_alpha: f64,
}

impl Default for BaselineSection {
    fn default() -> Self {
        Self { ucb_arm_key: UcbArmKey::Sev, mlinucb_alpha: 1.0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub mode: Mode,
    /// Number of tasks `T`.
    pub horizon: u64,
    pub seeds: Vec<u64>,
    #[serde(default = "default_policies")]
    pub policies: Vec<PolicyKind>,
    #[serde(default = "default_true")]
    pub delayed_feedback: bool,
    /// Sliding-window width for average rewards.
    #[serde(default = "default_window")]
    pub window: usize,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub learner: LearnerSection,
    #[serde(default)]
    pub tasks: TaskParams,
    #[serde(default)]
    pub radio: RadioSection,
    #[serde(default)]
    pub context: ContextBounds,
    #[serde(default)]
    pub synthetic: SyntheticParams,
    #[serde(default)]
    pub trace: TraceSection,
    #[serde(default)]
    pub baselines: BaselineSection,
}

fn default_policies() -> Vec<PolicyKind> {
    PolicyKind::ALL.to_vec()
}

fn default_true() -> bool {
    true
}

fn default_window() -> usize {
    2000
}

impl RunConfig {
    /// Defaults for `mode` with the given horizon and seeds.
    pub fn new(mode: Mode, horizon: u64, seeds: Vec<u64>) -> Self {
        Self {
            mode,
            horizon,
            seeds,
            policies: default_policies(),
            delayed_feedback: true,
            window: default_window(),
            output_dir: None,
            learner: LearnerSection::default(),
            tasks: TaskParams::default(),
            radio: RadioSection::default(),
            context: ContextBounds::default(),
            synthetic: SyntheticParams::default(),
            trace: TraceSection::default(),
            baselines: BaselineSection::default(),
        }
    }

    pub fn from_toml_str(text: &str) -> Result<Self, BenchError> {
        toml::from_str(text).map_err(|e| BenchError::Config(vec![e.message().to_string()]))
    }

    /// Parses and validates a file. Relative trace paths are resolved
    /// against the file's directory.
    pub fn load(path: impl AsRef<Path>) -> Result<Self, BenchError> {
        let config = Self::read(path)?;
        config.validate()?;
        Ok(config)
    }

    /// [`RunConfig::load`] without the validation step.
    pub fn read(path: impl AsRef<Path>) -> Result<Self, BenchError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| BenchError::Io(format!("{}: {e}", path.display())))?;
        let mut config = Self::from_toml_str(&text)?;
        let base = path.parent().unwrap_or(Path::new(""));
        for p in [&mut config.trace.manifest, &mut config.trace.canonical].into_iter().flatten() {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(config)
    }

    pub fn learner_config(&self) -> Result<LearnerConfig, BenchError> {
        LearnerConfig::new(self.horizon, self.learner.alpha, self.mode.context_dim(), self.learner.eta)
            .map_err(|e| BenchError::Config(vec![e.to_string()]))
    }

    pub fn violations(&self) -> Vec<String> {
        let mut errors = Vec::new();
        if self.horizon < 1 {
            errors.push("horizon must be at least 1".to_string());
        }
        if self.seeds.is_empty() {
            errors.push("seeds must not be empty".to_string());
        }
        if self.policies.is_empty() {
            errors.push("at least one policy is required".to_string());
        }
        let mut sorted = self.policies.clone();
        sorted.sort();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            errors.push("policies must not repeat".to_string());
        }
        let mut seeds = self.seeds.clone();
        seeds.sort_unstable();
        if seeds.windows(2).any(|w| w[0] == w[1]) {
            errors.push("seeds must not repeat".to_string());
        }
        if self.window < 1 {
            errors.push("window must be at least 1".to_string());
        }
        if !(self.learner.alpha > 0.0 && self.learner.alpha <= 1.0) {
            errors.push(format!("learner.alpha must lie in (0, 1], got {}", self.learner.alpha));
        }
        if !(0.0..1.0).contains(&self.learner.eta) {
            errors.push(format!("learner.eta must lie in [0, 1), got {}", self.learner.eta));
        }
        if let Some(dim) = self.learner.dim {
            let expected = self.mode.context_dim();
            if dim != expected {
                errors.push(format!("learner.dim is {dim} but {:?} mode produces {expected}-dimensional contexts", self.mode));
            }
        }
        if !(self.baselines.mlinucb_alpha >= 0.0) {
            errors.push(format!("baselines.mlinucb_alpha must be non-negative, got {}", self.baselines.mlinucb_alpha));
        }
        errors.extend(self.tasks.validate());
        match self.mode {
            Mode::Synthetic => errors.extend(self.synthetic.validate()),
            Mode::Trace => {
                errors.extend(self.radio.params().validate());
                errors.extend(self.context.validate());
                let t = &self.trace;
                match (&t.manifest, &t.canonical) {
                    (None, None) => errors.push("trace mode needs trace.manifest or trace.canonical".to_string()),
                    (Some(_), Some(_)) => errors.push("give only one of trace.manifest and trace.canonical".to_string()),
                    _ => {}
                }
                if let Err(e) = t.region.validate() {
                    errors.push(format!("trace.region: {e}"));
                }
                if !(t.max_gap_s > 0.0) {
                    errors.push(format!("trace.max_gap_s must be positive, got {}", t.max_gap_s));
                }
                if !(t.cpu_ghz.0 > 0.0 && t.cpu_ghz.0 <= t.cpu_ghz.1) {
                    errors.push(format!("trace.cpu_ghz must be a positive range, got {:?}", t.cpu_ghz));
                }
                if t.rsu_count < 1 {
                    errors.push("trace.rsu_count must be at least 1".to_string());
                }
                if !(t.rsu_spacing_m > 0.0) {
                    errors.push(format!("trace.rsu_spacing_m must be positive, got {}", t.rsu_spacing_m));
                }
                if !(t.coverage_m > 0.0) {
                    errors.push(format!("trace.coverage_m must be positive, got {}", t.coverage_m));
                }
                if !(0.0..=1.0).contains(&t.sev_fraction) {
                    errors.push(format!("trace.sev_fraction must lie in [0, 1], got {}", t.sev_fraction));
                }
            }
        }
        errors
    }

    pub fn validate(&self) -> Result<(), BenchError> {
        let errors = self.violations();
        if errors.is_empty() {
            Ok(())
        } else {
            Err(BenchError::Config(errors))
        }
    }
}
