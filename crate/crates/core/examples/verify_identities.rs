//! Kernel identity suite at a few values of p.

use asep::exactdist::{verify_identities, NumericsConfig};
use asep::params::make_params;

fn main() -> asep::error::Result<()> {
    let cfg = NumericsConfig::default();
    for p in [0.1, 0.3, 0.45] {
        let report = verify_identities(&make_params(p)?, &cfg);
        println!("p = {p}: {}", if report.all_passed() { "all passed" } else { "FAILURES" });
        for c in &report.checks {
            let mark = if c.passed { "ok  " } else { "FAIL" };
            println!("  {mark} {:<22} {:.2e} (tol {:.0e})  {}", c.name, c.error, c.tol, c.detail);
        }
    }
    Ok(())
}
