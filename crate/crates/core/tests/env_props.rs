use proptest::prelude::*;

use datev::env::{
    normalize, realize_quality, ContextBounds, DelayBreakdown, DelayPlan, RadioParams, SyntheticParams,
    SyntheticWorld, TaskParams,
};
use datev::stream_rng;

fn world() -> SyntheticWorld {
    SyntheticWorld::new(SyntheticParams::default(), TaskParams::default()).unwrap()
}

proptest! {
    #[test]
    fn quality_is_the_deadline_indicator(parts in prop::array::uniform6(0.0f64..1.0), deadline in 0.0f64..6.0) {
        let [tr, rs, c, sr, rr, rt] = parts;
        let d = DelayBreakdown { tr, rs, c, sr, rr, rt };
        let total = tr + rs + c + sr + rr + rt;
        prop_assert!((d.total() - total).abs() < 1e-12);
        prop_assert_eq!(realize_quality(&d, deadline), u8::from(d.total() <= deadline));
        prop_assert_eq!(realize_quality(&d, d.total()), 1);
    }

    #[test]
    fn success_probability_is_monotone_in_the_deadline(base in 0.0f64..1.0, l1 in 0.5f64..4.0, l2 in 0.5f64..4.0, seed in 0u64..1000) {
        let radio = RadioParams::default();
        let plan = DelayPlan {
            base: DelayBreakdown { tr: base, rs: 0.1, c: 0.2, sr: 0.1, rr: 0.0, rt: 0.1 },
            relay: true,
            result_bits: 0.5e6,
        };
        let (lo, hi) = if l1 <= l2 { (l1, l2) } else { (l2, l1) };
        // common random numbers make the estimate monotone pathwise
        let p_lo = plan.success_probability(&radio, lo, 200, &mut stream_rng(seed, 0));
        let p_hi = plan.success_probability(&radio, hi, 200, &mut stream_rng(seed, 0));
        prop_assert!((0.0..=1.0).contains(&p_lo));
        prop_assert!(p_lo <= p_hi);
    }

    #[test]
    fn sinr_decreases_with_distance(d1 in 0.0f64..2000.0, d2 in 0.0f64..2000.0) {
        let radio = RadioParams::default();
        let (near, far) = if d1 <= d2 { (d1, d2) } else { (d2, d1) };
        prop_assert!(radio.sinr_at(near) >= radio.sinr_at(far));
        prop_assert!(radio.sinr_at(far) > 0.0);
    }

    #[test]
    fn normalized_contexts_lie_in_the_unit_box(
        tav in -10.0f64..60.0, sev in -10.0f64..60.0, dist in -100.0f64..1200.0, deadline in 0.0f64..5.0,
    ) {
        let phi = ContextBounds::default().vector(tav, sev, dist, deadline);
        prop_assert_eq!(phi.dim(), 4);
        prop_assert!(phi.coords().iter().all(|x| (0.0..=1.0).contains(x)));
        let v = normalize(dist, (0.0, 600.0));
        prop_assert!((0.0..=1.0).contains(&v));
    }

    #[test]
    fn synthetic_mu_is_a_probability_and_grows_with_slack(a in 0.5f64..1.25, l1 in 1.0f64..2.5, l2 in 1.0f64..2.5) {
        let w = world();
        let (lo, hi) = if l1 <= l2 { (l1, l2) } else { (l2, l1) };
        let (m_lo, m_hi) = (w.mu(a, lo), w.mu(a, hi));
        prop_assert!((0.0..=1.0).contains(&m_lo) && (0.0..=1.0).contains(&m_hi));
        prop_assert!(m_lo <= m_hi);
        let phi = w.context(a, lo);
        prop_assert!((w.mu_at(phi.coords()) - m_lo).abs() < 1e-9);
    }

    #[test]
    fn synthetic_episodes_are_well_formed(seed in 0u64..10_000) {
        let ep = world().episode(50, seed);
        prop_assert_eq!(ep.len(), 50);
        let mut last = 0.0;
        for round in &ep.rounds {
            prop_assert!(round.task.arrival_time > last);
            last = round.task.arrival_time;
            prop_assert!(round.candidates.windows(2).all(|w| w[0].id < w[1].id));
            for c in &round.candidates {
                prop_assert_eq!(c.quality, u8::from(c.delay <= round.task.deadline));
                let ready = round.ready_time(c);
                if c.quality == 1 {
                    prop_assert!((ready - (round.task.arrival_time + c.delay)).abs() < 1e-9);
                } else {
                    prop_assert!((ready - (round.task.arrival_time + round.task.deadline)).abs() < 1e-9);
                }
            }
        }
    }
}
