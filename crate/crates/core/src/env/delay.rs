//! Service delay of one replication and its deadline outcome.

use rand::Rng;

use super::RadioParams;

/// Six-segment delay: TaV to RSU upload, RSU to SeV dispatch, computing,
/// SeV to serving RSU, inter-RSU relay, RSU to TaV delivery. Seconds.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct DelayBreakdown {
    pub tr: f64,
    pub rs: f64,
    pub c: f64,
    pub sr: f64,
    pub rr: f64,
    pub rt: f64,
}

impl DelayBreakdown {
    pub fn total(&self) -> f64 {
        self.tr + self.rs + self.c + self.sr + self.rr + self.rt
    }
}

/// `1{total <= deadline}`.
pub fn realize_quality(delay: &DelayBreakdown, deadline: f64) -> u8 {
    u8::from(delay.total() <= deadline)
}

/// The deterministic part of a replication's delay plus whether the result
/// must cross the backhaul.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DelayPlan {
    pub base: DelayBreakdown,
    pub relay: bool,
    pub result_bits: f64,
}

impl DelayPlan {
    /// Draws the backhaul rate and round-trip time when a relay is needed.
    pub fn sample<R: Rng + ?Sized>(&self, radio: &RadioParams, rng: &mut R) -> DelayBreakdown {
        let mut d = self.base;
        if self.relay {
            let (glo, ghi) = radio.backhaul_rate_bps;
            let (hlo, hhi) = radio.backhaul_rtt_s;
            let g = if glo < ghi { rng.random_range(glo..=ghi) } else { glo };
            let h = if hlo < hhi { rng.random_range(hlo..=hhi) } else { hlo };
            d.rr = self.result_bits / g + h;
        }
        d
    }

    /// Probability the sampled total meets `deadline`, estimated from
    /// `samples` draws. Exact when no relay is involved.
    pub fn success_probability<R: Rng + ?Sized>(
        &self,
        radio: &RadioParams,
        deadline: f64,
        samples: usize,
        rng: &mut R,
    ) -> f64 {
        if !self.relay {
            return f64::from(realize_quality(&self.base, deadline));
        }
        let hits = (0..samples)
            .filter(|_| realize_quality(&self.sample(radio, rng), deadline) == 1)
            .count();
        hits as f64 / samples as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn quality_boundary_is_inclusive() {
        let d = |total| DelayBreakdown { c: total, ..Default::default() };
        assert_eq!(realize_quality(&d(1.2), 1.5), 1);
        assert_eq!(realize_quality(&d(1.5), 1.5), 1);
        assert_eq!(realize_quality(&d(2.6), 2.5), 0);
    }

    #[test]
    fn relay_segment_stays_in_range() {
        let radio = RadioParams::default();
        let plan = DelayPlan { base: DelayBreakdown { c: 0.1, ..Default::default() }, relay: true, result_bits: 0.5e6 };
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..1000 {
            let d = plan.sample(&radio, &mut rng);
            // y/g in [1/3, 1] s, h in [0.02, 0.3] s
            assert!(d.rr >= 0.5e6 / 1.5e6 + 0.02 - 1e-12 && d.rr <= 1.0 + 0.3 + 1e-12);
            assert!((d.total() - (0.1 + d.rr)).abs() < 1e-12);
        }
        let local = DelayPlan { relay: false, ..plan };
        assert_eq!(local.sample(&radio, &mut rng).rr, 0.0);
    }

    #[test]
    fn monte_carlo_probability_matches_closed_form() {
        // rtt fixed at 0, rate uniform on [0.5, 1.5] Mbps, y = 0.5 Mb:
        // P(y/g <= 0.5) = P(g >= 1 Mbps) = 0.5
        let radio = RadioParams { backhaul_rtt_s: (0.0, 0.0), ..RadioParams::default() };
        let plan = DelayPlan { base: DelayBreakdown::default(), relay: true, result_bits: 0.5e6 };
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let p = plan.success_probability(&radio, 0.5, 10_000, &mut rng);
        assert!((p - 0.5).abs() < 3.0 * 0.005, "{p}");
    }
}
