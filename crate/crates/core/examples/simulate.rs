//! Monte Carlo estimate of P(x_m <= x) and a look at a few sample paths.

use asep::params::make_params;
use asep::sim::{estimate_prob, simulate_once, SimConfig};

fn main() -> asep::error::Result<()> {
    let params = make_params(0.25)?;
    let t_phys = 4.0;
    let cfg = SimConfig { trials: 50_000, seed: 1, ..Default::default() };
    for x in [-3, -1, 0, 1] {
        let e = estimate_prob(&params, 2, x, t_phys, &cfg)?;
        println!("P(x_2({t_phys}) <= {x:>2}) ~ {:.4} +- {:.4}", e.p_hat, e.stderr);
    }

    for trial in 0..3 {
        let s = simulate_once(&params, t_phys, None, cfg.seed, trial)?;
        let first: Vec<i64> = (1..=6).map(|m| s.position(m)).collect();
        println!("trial {trial}: first six particles at {first:?}");
    }

    // A particle cap freezes everything behind it; the estimate warns when
    // doubling the cap moves the answer.
    let capped = SimConfig { n_particles: Some(2), ..cfg };
    let e = estimate_prob(&params, 2, 0, t_phys, &capped)?;
    println!("with 2 particles: {:.4}, warning: {:?}", e.p_hat, e.truncation_warning);
    Ok(())
}
