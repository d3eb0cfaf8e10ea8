//! The exact formula, the oracle and simulation at one point.

use asep::exactdist::{prob_leq, NumericsConfig};
use asep::params::make_params;
use asep::sim::{ctmc_oracle, estimate_prob, OracleConfig, SimConfig};

fn main() -> asep::error::Result<()> {
    let params = make_params(0.2)?;
    let (m, x, t_phys) = (2, 0, 1.0);
    let t = params.formula_time(t_phys);
    let exact = prob_leq(&params, m, x, t, &NumericsConfig::default())?;
    let oracle = ctmc_oracle(&params, m, x, t_phys, &OracleConfig::default())?;
    let mc = estimate_prob(&params, m, x, t_phys, &SimConfig { trials: 100_000, ..Default::default() })?;
    println!("P(x_{m}({t_phys}) <= {x}) at p = {}", params.p);
    println!("  exact       {:.12}  err {:.1e}", exact.prob, exact.err_est);
    println!("  oracle      {:.12}  bound {:.1e}", oracle.prob, oracle.truncation_bound);
    println!("  monte carlo {:.12}  se {:.1e}", mc.p_hat, mc.stderr);
    println!("  |exact - oracle| = {:.1e}", (exact.prob - oracle.prob).abs());
    println!("  (mc - exact) / se = {:.2}", (mc.p_hat - exact.prob) / mc.stderr);
    Ok(())
}
