//! Link model: path-loss SINR, Shannon rate, fixed RSU rates and the
//! backhaul ranges.

use serde::{Deserialize, Serialize};

use super::EnvError;

pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf(dbm / 10.0) / 1000.0
}

/// Physical-layer parameters, in linear units.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadioParams {
    /// Transmit power of vehicles and RSUs, watts.
    pub tx_power_w: f64,
    pub path_loss_exponent: f64,
    pub noise_w: f64,
    pub interference_w: f64,
    /// Minimum SINR for an RSU to reach a SeV.
    pub sinr_threshold: f64,
    pub bandwidth_hz: f64,
    /// Fixed RSU-to-vehicle rate, bits/s.
    pub downlink_rate_bps: f64,
    /// Inter-RSU backhaul rate range, bits/s.
    pub backhaul_rate_bps: (f64, f64),
    /// Backhaul round-trip time range, seconds.
    pub backhaul_rtt_s: (f64, f64),
    /// Distances below this are clamped to it before the path-loss term.
    pub min_distance_m: f64,
}

impl Default for RadioParams {
    fn default() -> Self {
        Self {
            tx_power_w: dbm_to_watts(10.0),
            path_loss_exponent: 3.0,
            noise_w: dbm_to_watts(-172.0),
            interference_w: 0.0,
            sinr_threshold: 0.15,
            bandwidth_hz: 10e6,
            downlink_rate_bps: 3e6,
            backhaul_rate_bps: (0.5e6, 1.5e6),
            backhaul_rtt_s: (0.020, 0.300),
            min_distance_m: 1.0,
        }
    }
}

impl RadioParams {
    pub fn validate(&self) -> Vec<String> {
        let mut errors = Vec::new();
        let positive = [
            ("tx_power", self.tx_power_w),
            ("path_loss_exponent", self.path_loss_exponent),
            ("noise", self.noise_w),
            ("sinr_threshold", self.sinr_threshold),
            ("bandwidth_hz", self.bandwidth_hz),
            ("downlink_rate_bps", self.downlink_rate_bps),
            ("min_distance_m", self.min_distance_m),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                errors.push(format!("radio.{name} must be positive, got {v}"));
            }
        }
        if !(self.interference_w >= 0.0) {
            errors.push(format!("radio.interference_w must be non-negative, got {}", self.interference_w));
        }
        let (glo, ghi) = self.backhaul_rate_bps;
        if !(glo > 0.0 && glo <= ghi) {
            errors.push(format!("radio.backhaul_rate_bps must be a positive range, got [{glo}, {ghi}]"));
        }
        let (hlo, hhi) = self.backhaul_rtt_s;
        if !(hlo >= 0.0 && hlo <= hhi) {
            errors.push(format!("radio.backhaul_rtt_s must be a non-negative range, got [{hlo}, {hhi}]"));
        }
        errors
    }

    /// SINR of a link of length `distance` under this parameter set.
    pub fn sinr_at(&self, distance: f64) -> f64 {
        sinr(self, distance.max(self.min_distance_m)).expect("clamped distance is positive")
    }

    /// Whether a receiver at `distance` clears the SINR threshold.
    pub fn reachable(&self, distance: f64) -> bool {
        self.sinr_at(distance) >= self.sinr_threshold
    }
}

/// `P * l^(-alpha) / (sigma^2 + I)`.
pub fn sinr(params: &RadioParams, distance: f64) -> Result<f64, EnvError> {
    if !(distance > 0.0) {
        return Err(EnvError::InvalidArgument(format!(
            "link distance must be positive, got {distance}"
        )));
    }
    Ok(params.tx_power_w * distance.powf(-params.path_loss_exponent)
        / (params.noise_w + params.interference_w))
}

/// `W log2(1 + SINR)`, bits/s.
pub fn shannon_rate(params: &RadioParams, sinr_value: f64) -> f64 {
    params.bandwidth_hz * (1.0 + sinr_value.max(0.0)).log2()
}
