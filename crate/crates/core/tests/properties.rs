//! Randomized invariants.

use asep::cli::{config_hash, fmt_float, parse_sweep};
use asep::exactdist::{prob_gt, prob_leq, NumericsConfig};
use asep::limitdist::{crossover_cdf, f2_cdf, theorem1_tail, LimitConfig};
use asep::params::make_params;
use asep::sim::{sample_positions, SimConfig};
use proptest::prelude::*;

fn slow(cases: u32) -> ProptestConfig {
    ProptestConfig { cases, ..ProptestConfig::default() }
}

proptest! {
    #![proptest_config(slow(6))]

    #[test]
    fn exact_is_a_cdf_in_x(p in 0.05f64..0.4, m in 1u32..=3, t in 0.3f64..1.5) {
        let a = make_params(p).unwrap();
        let cfg = NumericsConfig::default();
        let mut last = 0.0;
        for x in (m as i64 - 3)..=(m as i64) {
            let v = prob_leq(&a, m, x, t, &cfg).unwrap();
            prop_assert!((0.0..=1.0).contains(&v.prob));
            prop_assert!(v.prob >= last - 1e-9, "x = {x}: {} < {last}", v.prob);
            last = v.prob;
        }
        prop_assert!((last - 1.0).abs() < 1e-9);
    }

    #[test]
    fn residue_and_contour_routes_complement(p in 0.05f64..0.4, m in 1u32..=3, dx in 1i64..=3, t in 0.3f64..1.5) {
        let a = make_params(p).unwrap();
        let cfg = NumericsConfig::default();
        let x = m as i64 - dx;
        let leq = prob_leq(&a, m, x, t, &cfg).unwrap();
        let gt = prob_gt(&a, m, x, t, &cfg).unwrap();
        prop_assert!((leq.raw + gt.value - 1.0).abs() < 1e-8, "{} + {}", leq.raw, gt.value);
    }
}

proptest! {
    #[test]
    fn tail_asymptotic_vanishes_exactly_past_m(p in 0.0f64..0.49, m in 1u32..6, x in -5i64..8, t in 0.5f64..40.0) {
        let a = make_params(p).unwrap();
        let v = theorem1_tail(&a, m, x, t).unwrap();
        if x >= m as i64 {
            prop_assert!(v.vanishes && v.value == 0.0);
        } else {
            prop_assert!(!v.vanishes && v.value > 0.0);
            // Past its peak at t = 2m - x - 2 the asymptotic decreases.
            let peak = (2 * m as i64 - x - 2).max(0) as f64;
            if t > peak {
                prop_assert!(theorem1_tail(&a, m, x, t + 1.0).unwrap().value < v.value);
            }
        }
    }

    #[test]
    fn float_format_round_trips(v in any::<f64>().prop_filter("finite", |v| v.is_finite())) {
        let s = fmt_float(v);
        prop_assert_eq!(s.parse::<f64>().unwrap(), v);
        prop_assert!(!s.contains('E'));
    }

    #[test]
    fn sweep_counts_points(a in -10.0f64..10.0, k in 0usize..200, h in prop::sample::select(vec![0.125, 0.25, 0.5, 1.0])) {
        let b = a + k as f64 * h;
        let g = parse_sweep(&format!("{a}:{b}:{h}")).unwrap();
        prop_assert_eq!(g.len(), k + 1);
        prop_assert_eq!(g[0], a);
        prop_assert!((g[k] - b).abs() < 1e-9);
    }

    #[test]
    fn config_hash_tracks_settings(p in 0.0f64..0.49, m in 1u32..50) {
        let a = serde_json::json!({"p": p, "m": m});
        let b = serde_json::json!({"m": m, "p": p});
        let c = serde_json::json!({"p": p, "m": m + 1});
        prop_assert_eq!(config_hash("exact", &a), config_hash("exact", &b));
        prop_assert_ne!(config_hash("exact", &a), config_hash("exact", &c));
        prop_assert_ne!(config_hash("exact", &a), config_hash("oracle", &a));
    }
}

proptest! {
    #![proptest_config(slow(16))]

    #[test]
    fn simulated_particles_keep_order(p in 0.0f64..0.49, t in 0.1f64..8.0, seed in any::<u64>()) {
        let a = make_params(p).unwrap();
        let cfg = SimConfig { trials: 50, seed, parallel: false, ..Default::default() };
        let rows = sample_positions(&a, &[1, 2, 3, 4, 5], t, &cfg).unwrap();
        for r in &rows {
            prop_assert!(r.windows(2).all(|w| w[0] < w[1]), "{r:?}");
            prop_assert!(r[4] <= 5);
        }
        let par = sample_positions(&a, &[1, 2, 3, 4, 5], t, &SimConfig { parallel: true, ..cfg }).unwrap();
        prop_assert_eq!(rows, par);
    }

    #[test]
    fn f2_is_monotone(s in -7.0f64..6.0, ds in 0.01f64..2.0) {
        let cfg = LimitConfig::default();
        let lo = f2_cdf(s, &cfg).unwrap().value;
        let hi = f2_cdf(s + ds, &cfg).unwrap().value;
        prop_assert!(hi >= lo - 1e-12, "{lo} {hi}");
        prop_assert!((0.0..=1.0).contains(&lo));
    }

    #[test]
    fn crossover_is_monotone(p in 0.01f64..0.45, m in 1u32..=3, s in -3.0f64..3.0, ds in 0.05f64..1.0) {
        let a = make_params(p).unwrap();
        let cfg = LimitConfig::default();
        let lo = crossover_cdf(&a, m, s, &cfg).unwrap().value;
        let hi = crossover_cdf(&a, m, s + ds, &cfg).unwrap().value;
        prop_assert!(hi >= lo - 1e-8, "{lo} {hi}");
    }
}
