//! Empirical cube-root-scaled CDF of x_m with m = sigma t against F2.

use asep::limitdist::{f2_cdf, LimitConfig};
use asep::params::make_params;
use asep::sim::{empirical_scaled_cdf, SimConfig};

fn main() -> asep::error::Result<()> {
    let (sigma, t) = (0.25, 60.0);
    let cfg = SimConfig { trials: 20_000, seed: 3, ..Default::default() };
    let lcfg = LimitConfig::default();
    for p in [0.0, 0.3] {
        let params = make_params(p)?;
        let table = empirical_scaled_cdf(&params, sigma, params.physical_time(t)?, &[-2.0, -1.0, 0.0, 1.0, 2.0], &cfg)?;
        println!("p = {p}, formula time {t}:");
        for ((s, v), se) in table.s_grid.iter().zip(&table.values).zip(&table.err_est) {
            let f2 = f2_cdf(*s, &lcfg)?.value;
            println!("  s' = {s:>7.3}: empirical {v:.4} +- {se:.4}, F2 {f2:.4}");
        }
    }
    Ok(())
}
