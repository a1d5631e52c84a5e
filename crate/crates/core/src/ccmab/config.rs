use serde::{Deserialize, Serialize};

use super::CcmabError;
use crate::reward::RewardParams;

/// Horizon-dependent parameters of the partition learner.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LearnerConfig {
    /// Number of tasks `T` the partition is sized for.
    pub horizon: u64,
    /// Hölder exponent of the quality function.
    pub alpha: f64,
    /// Context dimension `D`.
    pub dim: usize,
    pub reward: RewardParams,
    /// Hölder constant; only consulted by estimator-accuracy checks.
    pub holder_constant: Option<f64>,
}

impl LearnerConfig {
    pub fn new(horizon: u64, alpha: f64, dim: usize, eta: f64) -> Result<Self, CcmabError> {
        let config = Self {
            horizon,
            alpha,
            dim,
            reward: RewardParams::new(eta)?,
            holder_constant: None,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), CcmabError> {
        if self.horizon == 0 {
            return Err(CcmabError::InvalidConfig("horizon must be at least 1".into()));
        }
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return Err(CcmabError::InvalidConfig(format!(
                "alpha must be a positive finite number, got {}",
                self.alpha
            )));
        }
        if self.dim == 0 {
            return Err(CcmabError::InvalidConfig("context dimension must be at least 1".into()));
        }
        Ok(())
    }

    fn denominator(&self) -> f64 {
        3.0 * self.alpha + self.dim as f64
    }

    /// Cells per dimension, `ceil(T^(1 / (3 alpha + D)))`.
    pub fn cells_per_dim(&self) -> u32 {
        let x = (self.horizon as f64).powf(1.0 / self.denominator());
        // 1e5^(1/5) evaluates to 10.000000000000002; snap near-integers first
        let nearest = x.round();
        let h = if (x - nearest).abs() <= 1e-9 * nearest.max(1.0) {
            nearest
        } else {
            x.ceil()
        };
        (h as u32).max(1)
    }

    /// Exponent `2 alpha / (3 alpha + D)` of the control function.
    pub fn control_exponent(&self) -> f64 {
        2.0 * self.alpha / self.denominator()
    }

    /// The largest number of exploration rounds the counting argument allows:
    /// `h^D * ceil(T^z ln T)`.
    pub fn exploration_bound(&self) -> f64 {
        let t = self.horizon as f64;
        let h = self.cells_per_dim() as f64;
        h.powi(self.dim as i32) * (t.powf(self.control_exponent()) * t.ln()).ceil()
    }
}

/// `K(t) = t^(2 alpha / (3 alpha + D)) ln t`.
pub fn control_function(t: u64, config: &LearnerConfig) -> f64 {
    let t = t.max(1) as f64;
    t.powf(config.control_exponent()) * t.ln()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn cells_per_dim_examples() {
        assert_eq!(LearnerConfig::new(100_000, 1.0, 2, 0.1).unwrap().cells_per_dim(), 10);
        assert_eq!(LearnerConfig::new(1, 1.0, 2, 0.1).unwrap().cells_per_dim(), 1);
        assert_eq!(LearnerConfig::new(1000, 1.0, 3, 0.1).unwrap().cells_per_dim(), 4);
        assert_eq!(LearnerConfig::new(50_000, 1.0, 2, 0.1).unwrap().cells_per_dim(), 9);
    }

    #[test]
    fn control_function_examples() {
        let c = LearnerConfig::new(100_000, 1.0, 2, 0.1).unwrap();
        assert_eq!(control_function(1, &c), 0.0);
        // 100^0.4 * ln 100
        let expected = 10f64.powf(0.8) * 100f64.ln();
        assert_abs_diff_eq!(control_function(100, &c), expected, epsilon = 1e-9);
        assert_abs_diff_eq!(control_function(100, &c), 29.056_66, epsilon = 1e-5);
    }

    #[test]
    fn control_function_monotone() {
        let c = LearnerConfig::new(1_000_000, 1.0, 2, 0.1).unwrap();
        let mut prev = control_function(1, &c);
        for t in 2..=1_000_000 {
            let k = control_function(t, &c);
            assert!(k >= prev && k >= 0.0, "K({t}) = {k} < {prev}");
            prev = k;
        }
    }

    #[test]
    fn rejects_bad_config() {
        assert!(LearnerConfig::new(0, 1.0, 2, 0.1).is_err());
        assert!(LearnerConfig::new(10, 0.0, 2, 0.1).is_err());
        assert!(LearnerConfig::new(10, 1.0, 0, 0.1).is_err());
        assert!(LearnerConfig::new(10, 1.0, 2, 1.5).is_err());
    }
}
