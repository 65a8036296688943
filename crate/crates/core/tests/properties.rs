use proptest::prelude::*;

use firstgap::asymptotics::sandwich_bounds;
use firstgap::dde::solve_tail;
use firstgap::finiteness::log_threshold_classify;
use firstgap::intensity::{Family, RateFunction};
use firstgap::montecarlo::{path_rng, simulate_counts, SimulationConfig, TailCounts};
use firstgap::restart::{classify_restart, random_length_bounds, simulate_restart_path, time_change, ServiceRate, SolverBudget};

fn family() -> impl Strategy<Value = Family> {
    prop_oneof![
        (0.2f64..3.0).prop_map(|mu| Family::Constant { mu }),
        (0.3f64..3.0, 0.1f64..1.5).prop_map(|(a, b)| Family::PowerDecay { a, b }),
        (0.3f64..3.0, 0.05f64..1.0).prop_map(|(a, b)| Family::ExpDecay { a, b }),
        (0.3f64..3.0, 0.1f64..1.5).prop_map(|(a, b)| Family::LogGrowth { a, b }),
        (0.3f64..3.0, 0.1f64..2.0).prop_map(|(a, b)| Family::LogPowerDecay { a, b }),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn tail_is_a_monotone_probability(f in family(), ell in 0.3f64..3.0) {
        let rf = RateFunction::family(f).unwrap();
        let curve = solve_tail(&rf, ell, 8.0 * ell, ell / 32.0).unwrap();
        let p0 = -(-rf.cumulative(0.0, ell).unwrap()).exp_m1();
        prop_assert!((curve.values[0] - p0).abs() <= 1e-14 * p0);
        prop_assert!(curve.values.iter().all(|&p| (0.0..=1.0).contains(&p)));
        prop_assert!(curve.neg_log.windows(2).all(|w| w[1] >= w[0]));
    }

    #[test]
    fn sandwich_is_ordered(f in family(), t in 0.0f64..60.0, eps in 0.01f64..0.49) {
        let rf = RateFunction::family(f).unwrap();
        let (lo, hi) = sandwich_bounds(&rf, t, eps, 0).unwrap();
        prop_assert!(lo <= hi + 1e-9 * hi.abs());
    }

    #[test]
    fn partitions_merge_to_the_whole(split in 1u64..1999, seed in any::<u64>()) {
        let rf = RateFunction::constant(1.2).unwrap();
        let config = SimulationConfig::new(rf, 1.0, 5.0, 2000, seed).unwrap();
        let grid = [0.0, 0.5, 2.0, 4.0];
        let whole = simulate_counts(&config, &grid, 0..2000).unwrap();
        let parts = simulate_counts(&config, &grid, split..2000).unwrap()
            .merge(&simulate_counts(&config, &grid, 0..split).unwrap());
        prop_assert_eq!(whole, parts.merge(&TailCounts::empty(grid.len())));
    }

    #[test]
    fn restart_paths_couple_exactly(a in 0.5f64..2.0, b in -0.5f64..2.0, mu in 0.2f64..2.0, seed in any::<u64>()) {
        let sr = ServiceRate::power_law(a, b).unwrap();
        let path = simulate_restart_path(mu, &sr, 1.0, 1_000_000, &mut path_rng(seed, 0)).unwrap();
        prop_assert!((path.direct - path.mapped).abs() <= 1e-10 * path.direct.max(1.0));
    }

    #[test]
    fn restart_verdict_matches_threshold_test(a in 0.2f64..3.0, b in -0.9f64..3.0, mu in 0.1f64..3.0, ell in 0.2f64..3.0) {
        let sr = ServiceRate::power_law(a, b).unwrap();
        let direct = classify_restart(mu, &sr, ell).unwrap();
        let via_rate = log_threshold_classify(&time_change(mu, &sr).unwrap(), ell).unwrap();
        prop_assert_eq!(direct.verdict, via_rate.verdict);
    }

    #[test]
    fn random_length_bounds_are_ordered(mu in 0.3f64..2.0, ell in 0.5f64..2.0, eps in 0.01f64..0.3, t in 0.0f64..10.0) {
        let rf = RateFunction::constant(mu).unwrap();
        let (lo, hi) = random_length_bounds(&rf, ell, eps, 0.1, t, SolverBudget::default()).unwrap();
        prop_assert!(lo <= hi);
        prop_assert!((0.0..=1.0).contains(&lo) && (0.0..=1.0).contains(&hi));
    }
}
