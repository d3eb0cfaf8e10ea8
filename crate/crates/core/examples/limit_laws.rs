//! The three limit laws: the large-time tail, the crossover family and F2.

use asep::exactdist::{prob_gt, NumericsConfig};
use asep::limitdist::{crossover_cdf, f2_cdf, theorem1_tail, LimitConfig};
use asep::params::make_params;
use asep::precision::high_precision_mode;

fn main() -> asep::error::Result<()> {
    let params = make_params(0.3)?;
    let lcfg = LimitConfig::default();

    // Fixed m and x: the tail decays like t^{2m-x-2} e^{-t}.
    let wide = NumericsConfig::default().with_precision(high_precision_mode(106)?);
    for t in [5.0, 10.0, 20.0] {
        let exact = prob_gt(&params, 2, 0, t, &wide)?.value;
        let asym = theorem1_tail(&params, 2, 0, t)?.value;
        println!("t = {t:>4}: P(x_2 > 0) = {exact:.6e}, asymptotic {asym:.6e}, ratio {:.4}", exact / asym);
    }

    // Fixed m, diffusive window: one crossover law per p.
    for s in [-2.0, -1.0, 0.0, 1.0, 2.0] {
        let row: Vec<String> = [1, 2, 3]
            .iter()
            .map(|&m| crossover_cdf(&params, m, s, &lcfg).map(|v| format!("{:.6}", v.value)))
            .collect::<Result<_, _>>()?;
        println!("crossover s = {s:>4}: m = 1, 2, 3 -> {}", row.join("  "));
    }

    // m proportional to t: GUE Tracy-Widom.
    for s in [-3.0, -2.0, -1.0, 0.0, 1.0] {
        println!("F2({s:>4}) = {:.10}", f2_cdf(s, &lcfg)?.value);
    }
    Ok(())
}
