//! Ground truth: Monte Carlo simulation of the exclusion process and an exact
//! uniformization oracle for short times.

mod gillespie;
mod lpp;
mod oracle;

pub use gillespie::{simulate_with, SimState};
pub use lpp::tasep_lpp_time;
pub use oracle::{ctmc_oracle, ctmc_oracle_cells, OracleConfig, OracleResult};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{param_err, AsepError, Result};
use crate::limitdist::{theorem3_map, CdfTable, Law};
use crate::params::AsepParams;

/// Monte Carlo settings.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SimConfig {
    /// Freeze particles beyond this count. `None` simulates the infinite
    /// system, bringing particles in as soon as they can move.
    pub n_particles: Option<usize>,
    pub trials: u64,
    pub seed: u64,
    pub parallel: bool,
    /// Worker threads; `None` defers to `ASEP_THREADS`, then to rayon.
    pub threads: Option<usize>,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig { n_particles: None, trials: 100_000, seed: 20_240_601, parallel: true, threads: None }
    }
}

/// Generator for trial `trial`: one ChaCha8 stream per trial under a common
/// key, so outcomes do not depend on scheduling.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// One run from the step configuration to physical time `t_phys`.
pub fn simulate_once(params: &AsepParams, t_phys: f64, n_particles: Option<usize>, seed: u64, trial: u64) -> Result<SimState> {
    if !(t_phys > 0.0 && t_phys.is_finite()) {
        return param_err(format!("t_phys must be positive, got {t_phys}"));
    }
    Ok(simulate_with(params, t_phys, n_particles, &mut trial_rng(seed, trial)))
}

/// Thread count from `ASEP_THREADS`, if set.
pub fn thread_cap() -> Option<usize> {
    std::env::var("ASEP_THREADS").ok().and_then(|v| v.parse().ok()).filter(|&n| n > 0)
}

/// Run `f(trial)` for `trials` trials, in parallel when asked, returning
/// outputs in trial order.
pub fn run_trials<T: Send>(
    trials: u64,
    parallel: bool,
    threads: Option<usize>,
    f: impl Fn(u64) -> T + Sync + Send,
) -> Result<Vec<T>> {
    if !parallel {
        return Ok((0..trials).map(f).collect());
    }
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads.or_else(thread_cap) {
        builder = builder.num_threads(n);
    }
    let pool = builder.build().map_err(|e| AsepError::Numerical(format!("thread pool: {e}")))?;
    Ok(pool.install(|| (0..trials).into_par_iter().map(&f).collect()))
}

/// Positions of particles `ms` at `t_phys`, one row per trial.
pub fn sample_positions(params: &AsepParams, ms: &[u32], t_phys: f64, cfg: &SimConfig) -> Result<Vec<Vec<i64>>> {
    if ms.contains(&0) {
        return param_err("particle indices start at 1");
    }
    if let Some(n) = cfg.n_particles {
        if ms.iter().any(|&m| m as usize > n) {
            return param_err(format!("n_particles = {n} is below a requested particle index"));
        }
    }
    if !(t_phys > 0.0 && t_phys.is_finite()) {
        return param_err(format!("t_phys must be positive, got {t_phys}"));
    }
    if cfg.trials == 0 {
        return param_err("need at least one trial");
    }
    run_trials(cfg.trials, cfg.parallel, cfg.threads, |k| {
        let s = simulate_with(params, t_phys, cfg.n_particles, &mut trial_rng(cfg.seed, k));
        ms.iter().map(|&m| s.position(m as usize)).collect()
    })
}

/// Monte Carlo estimate of a probability.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub p_hat: f64,
    pub stderr: f64,
    pub trials: u64,
    pub hits: u64,
    /// Set when doubling the particle cap moved the estimate noticeably.
    pub truncation_warning: Option<String>,
}

/// Fraction of `hits` among `trials` with its binomial standard error.
pub fn binomial(hits: u64, trials: u64) -> (f64, f64) {
    let p = hits as f64 / trials as f64;
    (p, (p * (1.0 - p) / trials as f64).sqrt())
}

/// `P(x_m(t_phys) <= x)` by simulation.
pub fn estimate_prob(params: &AsepParams, m: u32, x: i64, t_phys: f64, cfg: &SimConfig) -> Result<Estimate> {
    if x >= m as i64 {
        return Ok(Estimate { p_hat: 1.0, stderr: 0.0, trials: cfg.trials, hits: cfg.trials, truncation_warning: None });
    }
    let rows = sample_positions(params, &[m], t_phys, cfg)?;
    let hits = rows.iter().filter(|r| r[0] <= x).count() as u64;
    let (p_hat, stderr) = binomial(hits, cfg.trials);
    let truncation_warning = match cfg.n_particles {
        Some(n) => truncation_check(params, m, x, t_phys, cfg, n)?,
        None => None,
    };
    Ok(Estimate { p_hat, stderr, trials: cfg.trials, hits, truncation_warning })
}

/// Rerun the first tenth of the trials with twice the particle cap and
/// compare.
fn truncation_check(params: &AsepParams, m: u32, x: i64, t_phys: f64, cfg: &SimConfig, n: usize) -> Result<Option<String>> {
    let sub = (cfg.trials / 10).max(1);
    let base = SimConfig { trials: sub, ..*cfg };
    let wide = SimConfig { n_particles: Some(2 * n), ..base };
    let count = |c: &SimConfig| -> Result<u64> {
        Ok(sample_positions(params, &[m], t_phys, c)?.iter().filter(|r| r[0] <= x).count() as u64)
    };
    let (a, se) = binomial(count(&base)?, sub);
    let (b, _) = binomial(count(&wide)?, sub);
    if (a - b).abs() > 2.0 * se.max(1.0 / sub as f64) {
        return Ok(Some(format!(
            "doubling n_particles to {} moved the estimate from {a:.5} to {b:.5} on {sub} trials",
            2 * n
        )));
    }
    Ok(None)
}

/// Empirical CDF of `x_m` on the cube-root scale at the lattice points given
/// by `theorem3_map`. `t_phys` is physical time; the scaling uses
/// `t = gamma t_phys`. The table's grid holds the realized `s'`.
pub fn empirical_scaled_cdf(
    params: &AsepParams,
    sigma: f64,
    t_phys: f64,
    s_grid: &[f64],
    cfg: &SimConfig,
) -> Result<CdfTable> {
    let t = params.formula_time(t_phys);
    if !(sigma * t >= 1.0) {
        return param_err(format!("sigma gamma t_phys = {} must be at least 1", sigma * t));
    }
    let pts: Vec<_> = s_grid.iter().map(|&s| theorem3_map(params, sigma, t, s)).collect::<Result<_>>()?;
    let m = pts[0].m;
    let rows = sample_positions(params, &[m], t_phys, cfg)?;
    let mut values = Vec::with_capacity(pts.len());
    let mut err = Vec::with_capacity(pts.len());
    for pt in &pts {
        let hits = rows.iter().filter(|r| r[0] <= pt.x).count() as u64;
        let (p, se) = binomial(hits, cfg.trials);
        values.push(p);
        err.push(se);
    }
    Ok(CdfTable {
        law: Law::F2,
        s_grid: pts.iter().map(|p| p.s_prime).collect(),
        values,
        err_est: err,
        params_used: serde_json::json!({
            "p": params.p,
            "sigma": sigma,
            "t_phys": t_phys,
            "m": m,
            "x": pts.iter().map(|p| p.x).collect::<Vec<_>>(),
            "trials": cfg.trials,
            "seed": cfg.seed,
        }),
    })
}
