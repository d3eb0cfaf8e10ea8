//! Uniformization oracle with its rigorous error bound.

use asep::params::make_params;
use asep::sim::{ctmc_oracle_cells, OracleConfig};

fn main() -> asep::error::Result<()> {
    let params = make_params(0.3)?;
    let cells: Vec<(u32, i64)> = vec![(1, -2), (1, 0), (2, -1), (2, 1), (3, 0), (3, 3)];
    for t_phys in [0.5, 1.0, 2.0] {
        let res = ctmc_oracle_cells(&params, &cells, t_phys, &OracleConfig::default())?;
        println!("physical time {t_phys}:");
        for (&(m, x), r) in cells.iter().zip(&res) {
            println!(
                "  P(x_{m} <= {x:>2}) = {:.12} +- {:.1e}  (rate {}, {} states)",
                r.prob, r.truncation_bound, r.rate, r.states
            );
        }
    }
    Ok(())
}
