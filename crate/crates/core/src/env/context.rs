//! Min-max normalization of trace-mode contexts.

use serde::{Deserialize, Serialize};

use crate::ccmab::ContextVector;

/// Bounds for the default four-dimensional context
/// `(TaV speed, SeV speed, TaV-SeV distance, deadline)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ContextBounds {
    /// Speed range, m/s.
    pub speed: (f64, f64),
    /// Distance range, meters.
    pub distance: (f64, f64),
    /// Deadline range, seconds.
    pub deadline: (f64, f64),
}

impl Default for ContextBounds {
    fn default() -> Self {
        Self { speed: (0.0, 30.0), distance: (0.0, 600.0), deadline: (1.0, 2.5) }
    }
}

/// `(v - lo) / (hi - lo)` clamped to `[0, 1]`; a degenerate range maps to 0.
pub fn normalize(v: f64, (lo, hi): (f64, f64)) -> f64 {
    if hi > lo {
        ((v - lo) / (hi - lo)).clamp(0.0, 1.0)
    } else {
        0.0
    }
}

impl ContextBounds {
    pub fn validate(&self) -> Vec<String> {
        let mut errors = Vec::new();
        for (name, (lo, hi)) in [("speed", self.speed), ("distance", self.distance), ("deadline", self.deadline)] {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                errors.push(format!("context.{name} must satisfy lo < hi, got [{lo}, {hi}]"));
            }
        }
        errors
    }

    pub fn vector(&self, tav_speed: f64, sev_speed: f64, distance: f64, deadline: f64) -> ContextVector {
        ContextVector::new(vec![
            normalize(tav_speed, self.speed),
            normalize(sev_speed, self.speed),
            normalize(distance, self.distance),
            normalize(deadline, self.deadline),
        ])
        .expect("normalized coordinates lie in [0, 1]")
    }
}
