//! Distribution of the third particle from the exact formula, in double and
//! in double-double precision.

use asep::exactdist::{prob_gt, prob_leq, NumericsConfig};
use asep::params::make_params;
use asep::precision::high_precision_mode;

fn main() -> asep::error::Result<()> {
    let params = make_params(0.3)?;
    let (m, t) = (3, 1.5);
    let cfg = NumericsConfig::default();
    println!("P(x_{m} <= x) at p = {}, formula time {t} (physical {:.3})", params.p, params.physical_time(t)?);
    for x in -4..=3 {
        let v = prob_leq(&params, m, x, t, &cfg)?;
        println!("  x = {x:>2}: {:.12}  (err {:.1e}, {} eta nodes)", v.prob, v.err_est, v.n_eta);
    }

    // Small tails come from the residue route; extended precision guards
    // against cancellation at larger times.
    let wide = cfg.with_precision(high_precision_mode(106)?);
    let gt = prob_gt(&params, m, -6, 6.0, &wide)?;
    println!("P(x_{m} > -6) at formula time 6: {:.6e} ({} bits)", gt.value, gt.bits);
    Ok(())
}
