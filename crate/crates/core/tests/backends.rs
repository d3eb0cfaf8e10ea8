//! Cross-checks between independent backends.

use asep::exactdist::{prob_leq, NumericsConfig};
use asep::params::make_params;
use asep::sim::{estimate_prob, tasep_lpp_time, trial_rng, SimConfig};

#[test]
fn last_passage_matches_particle_simulation_for_tasep() {
    let a = make_params(0.0).unwrap();
    let n = 40_000u64;
    for &(m, k, t) in &[(2usize, 2usize, 3.0), (3, 1, 2.0), (3, 4, 6.0)] {
        let lpp = (0..n).filter(|&i| tasep_lpp_time(m, k, &mut trial_rng(77, i)) <= t).count() as f64 / n as f64;
        let cfg = SimConfig { trials: n, seed: 78, ..Default::default() };
        let sim = estimate_prob(&a, m as u32, m as i64 - k as i64, t, &cfg).unwrap();
        let se = (2.0 * lpp * (1.0 - lpp) / n as f64).sqrt();
        assert!((lpp - sim.p_hat).abs() < 4.0 * se, "m={m} k={k}: lpp {lpp} sim {}", sim.p_hat);
    }
}

#[test]
fn exact_formula_matches_simulation_at_moderate_time() {
    let a = make_params(0.3).unwrap();
    let t = 6.0;
    let exact = prob_leq(&a, 3, 0, t, &NumericsConfig::default()).unwrap().prob;
    let cfg = SimConfig { trials: 60_000, seed: 5, ..Default::default() };
    let sim = estimate_prob(&a, 3, 0, a.physical_time(t).unwrap(), &cfg).unwrap();
    let se = (exact * (1.0 - exact) / cfg.trials as f64).sqrt();
    assert!((exact - sim.p_hat).abs() < 4.0 * se, "exact {exact} sim {}", sim.p_hat);
}

#[test]
fn simulation_matches_extended_precision_value_at_long_time() {
    // P(x_7 <= -5) at p = 0.3, formula time 28, from the 106-bit evaluator.
    let frozen = 0.681113;
    let a = make_params(0.3).unwrap();
    let cfg = SimConfig { trials: 40_000, seed: 31, ..Default::default() };
    let sim = estimate_prob(&a, 7, -5, a.physical_time(28.0).unwrap(), &cfg).unwrap();
    let se = (frozen * (1.0 - frozen) / cfg.trials as f64).sqrt();
    assert!((frozen - sim.p_hat).abs() < 4.0 * se, "sim {}", sim.p_hat);
}
