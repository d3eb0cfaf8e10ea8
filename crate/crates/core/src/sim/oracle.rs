use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{param_err, AsepError, Result};
use crate::params::AsepParams;

/// Transient probability from uniformization with a rigorous error bound:
/// the true value lies in `[prob - truncation_bound, prob + truncation_bound]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleResult {
    pub prob: f64,
    pub truncation_bound: f64,
    pub jump_cap: usize,
    /// Uniformization rate actually used.
    pub rate: f64,
    pub states: usize,
}

/// Knobs of the oracle.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OracleConfig {
    pub jump_cap: usize,
    /// Freeze particles beyond this count; `None` treats the infinite system.
    pub n_particles: Option<usize>,
    /// States whose mass falls below this are dropped (their mass moves
    /// into the bound).
    pub prune: f64,
    pub max_states: usize,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig { jump_cap: 60, n_particles: None, prune: 1e-18, max_states: 1_000_000 }
    }
}

/// States are the positions of the particles that have left their starting
/// sites, with trailing particles still at home stripped.
type State = Vec<i32>;

fn canon(mut s: State) -> State {
    while let Some(&l) = s.last() {
        if l as usize == s.len() {
            s.pop();
        } else {
            break;
        }
    }
    s
}

fn pos(s: &State, i: usize) -> i32 {
    s.get(i).copied().unwrap_or(i as i32 + 1)
}

/// Allowed moves `(particle, direction, rate)` from state `s`. Only the first
/// `len + 1` particles can move; the rest are packed behind them.
fn moves(s: &State, p: f64, q: f64, cap: Option<usize>) -> Vec<(usize, i32, f64)> {
    let k = s.len();
    let mut out = Vec::with_capacity(2 * (k + 1));
    let movable = cap.map_or(k + 1, |c| (k + 1).min(c));
    for i in 0..movable {
        let xi = pos(s, i);
        let left = i == 0 || pos(s, i - 1) < xi - 1;
        let right = cap.is_none_or(|c| i + 1 < c) && pos(s, i + 1) > xi + 1;
        if left && q > 0.0 {
            out.push((i, -1, q));
        }
        if right && p > 0.0 {
            out.push((i, 1, p));
        }
    }
    out
}

fn apply(s: &State, i: usize, d: i32) -> State {
    let mut v = s.clone();
    while v.len() <= i {
        v.push(v.len() as i32 + 1);
    }
    v[i] += d;
    canon(v)
}

/// `P(x_m(t_phys) <= x)` by uniformization of the continuous-time chain.
///
/// The infinite system has unbounded exit rates, so at rate `rate` any state
/// whose exit rate exceeds it is absorbed and its mass joins the error. Up to
/// that absorption the uniformized chain is exact, so with `acc` the captured
/// mass of the event and `total` the captured mass overall the answer lies in
/// `[acc, acc + 1 - total]`. The rate starts at 4 and grows by half while that
/// helps; the tightest run is returned.
pub fn ctmc_oracle(params: &AsepParams, m: u32, x: i64, t_phys: f64, cfg: &OracleConfig) -> Result<OracleResult> {
    Ok(ctmc_oracle_cells(params, &[(m, x)], t_phys, cfg)?[0])
}

/// `ctmc_oracle` for several `(m, x)` cells at once, sharing one pass.
pub fn ctmc_oracle_cells(params: &AsepParams, cells: &[(u32, i64)], t_phys: f64, cfg: &OracleConfig) -> Result<Vec<OracleResult>> {
    if cells.is_empty() {
        return Ok(vec![]);
    }
    if cells.iter().any(|c| c.0 == 0) {
        return param_err("particle index m must be at least 1");
    }
    if !(t_phys >= 0.0 && t_phys.is_finite()) {
        return param_err(format!("time must be non-negative, got {t_phys}"));
    }
    if let Some(n) = cfg.n_particles {
        if let Some(c) = cells.iter().find(|c| c.0 as usize > n) {
            return param_err(format!("m = {} exceeds n_particles = {n}", c.0));
        }
    }
    // Particle m never passes site m, so those cells are certain.
    let open: Vec<(u32, i64)> = cells.iter().copied().filter(|&(m, x)| x < m as i64).collect();
    let solved = if open.is_empty() { vec![] } else { uniformize_adaptive(params, &open, t_phys, cfg)? };
    let mut solved = solved.into_iter();
    Ok(cells
        .iter()
        .map(|&(m, x)| {
            if x >= m as i64 {
                OracleResult { prob: 1.0, truncation_bound: 0.0, jump_cap: cfg.jump_cap, rate: 0.0, states: 0 }
            } else {
                solved.next().expect("one result per open cell")
            }
        })
        .collect())
}

/// Raise the uniformization rate while that tightens the bound.
fn uniformize_adaptive(params: &AsepParams, cells: &[(u32, i64)], t_phys: f64, cfg: &OracleConfig) -> Result<Vec<OracleResult>> {
    let mut rate = 4.0;
    let mut best: Option<Vec<OracleResult>> = None;
    loop {
        let (res, absorbed) = match (uniformize(params, cells, t_phys, rate, cfg), best.take()) {
            // A faster rate reaches more states; settle for the last run.
            (Err(AsepError::StateSpace(_)), Some(b)) => return Ok(b),
            (Err(e), _) => return Err(e),
            (Ok(r), prev) => {
                best = prev;
                r
            }
        };
        let bound = res[0].truncation_bound;
        let better = best.as_ref().is_none_or(|b| bound < b[0].truncation_bound);
        if better {
            best = Some(res);
        }
        if !better || absorbed <= 0.01 * bound || rate * t_phys > 0.5 * cfg.jump_cap as f64 {
            return Ok(best.unwrap());
        }
        rate *= 1.5;
    }
}

/// One uniformization pass; also returns the mass lost to absorption.
fn uniformize(
    params: &AsepParams,
    cells: &[(u32, i64)],
    t_phys: f64,
    rate: f64,
    cfg: &OracleConfig,
) -> Result<(Vec<OracleResult>, f64)> {
    let (p, q) = (params.p, params.q);
    let lt = rate * t_phys;
    let mut w = (-lt).exp();
    let mut acc = vec![0.0; cells.len()];
    let (mut total, mut absorbed) = (0.0, 0.0);
    let mut dist: BTreeMap<State, f64> = BTreeMap::new();
    dist.insert(State::new(), 1.0);
    for k in 0..=cfg.jump_cap {
        if k > 0 {
            w *= lt / k as f64;
        }
        for (s, &pr) in &dist {
            total += w * pr;
            for (a, &(m, x)) in acc.iter_mut().zip(cells) {
                if (pos(s, m as usize - 1) as i64) <= x {
                    *a += w * pr;
                }
            }
        }
        // Past the mode the remaining Poisson weight is below a geometric sum.
        let r = lt / (k as f64 + 2.0);
        if k == cfg.jump_cap || (r < 1.0 && w * lt / (k as f64 + 1.0) / (1.0 - r) < 1e-17) {
            break;
        }
        // Mass absorbed at step k+1 would have contributed with weights of
        // later steps; bounding that by 1 - total stays conservative.
        let mut next: BTreeMap<State, f64> = BTreeMap::new();
        for (s, &pr) in &dist {
            let mv = moves(s, p, q, cfg.n_particles);
            let out: f64 = mv.iter().map(|m| m.2).sum();
            if out > rate {
                absorbed += pr;
                continue;
            }
            *next.entry(s.clone()).or_insert(0.0) += pr * (1.0 - out / rate);
            for (i, d, r) in mv {
                *next.entry(apply(s, i, d)).or_insert(0.0) += pr * r / rate;
            }
        }
        next.retain(|_, v| *v > cfg.prune);
        if next.len() > cfg.max_states {
            return Err(AsepError::StateSpace(next.len()));
        }
        dist = next;
    }
    let bound = (1.0 - total).max(0.0);
    let res = acc
        .into_iter()
        .map(|a| OracleResult {
            prob: a + 0.5 * bound,
            truncation_bound: 0.5 * bound,
            jump_cap: cfg.jump_cap,
            rate,
            states: dist.len(),
        })
        .collect();
    Ok((res, absorbed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::make_params;

    #[test]
    fn zero_jumps() {
        let a = make_params(0.3).unwrap();
        let cfg = OracleConfig { jump_cap: 0, ..Default::default() };
        let r = ctmc_oracle(&a, 2, 1, 0.5, &cfg).unwrap();
        let lost = 1.0 - (-r.rate * 0.5f64).exp();
        assert!((r.prob - 0.5 * lost).abs() < 1e-15);
        assert!((r.truncation_bound - 0.5 * lost).abs() < 1e-15);
        let r = ctmc_oracle(&a, 2, 2, 0.5, &cfg).unwrap();
        assert_eq!((r.prob, r.truncation_bound), (1.0, 0.0));
    }

    #[test]
    fn free_walker_is_poisson() {
        // Leftmost TASEP particle: x_1(t) = 1 - Poisson(t).
        let a = make_params(0.0).unwrap();
        let cfg = OracleConfig { n_particles: Some(1), ..Default::default() };
        let t: f64 = 1.3;
        let mut tail = 1.0;
        let mut pmf = (-t).exp();
        for j in 0..5 {
            let r = ctmc_oracle(&a, 1, 1 - j as i64, t, &cfg).unwrap();
            assert!((r.prob - tail).abs() <= r.truncation_bound + 1e-14, "j={j}");
            tail -= pmf;
            pmf *= t / (j + 1) as f64;
        }
    }

    #[test]
    fn wall_of_one_matches_infinite_first_particle_for_tasep() {
        // With p = 0 nothing ever pushes on particle 1 from behind.
        let a = make_params(0.0).unwrap();
        let inf = ctmc_oracle(&a, 1, 0, 1.0, &OracleConfig::default()).unwrap();
        let one = ctmc_oracle(&a, 1, 0, 1.0, &OracleConfig { n_particles: Some(1), ..Default::default() }).unwrap();
        let want = 1.0 - (-1.0f64).exp();
        assert!(inf.truncation_bound < 1e-10, "{inf:?}");
        assert!((inf.prob - want).abs() <= inf.truncation_bound + 1e-14);
        assert!((one.prob - want).abs() <= one.truncation_bound + 1e-14);
    }

    #[test]
    fn canonical_form() {
        assert_eq!(canon(vec![0, 2, 3]), vec![0]);
        assert_eq!(apply(&vec![], 0, -1), vec![0]);
        assert_eq!(apply(&vec![0], 1, -1), vec![0, 1]);
        assert_eq!(apply(&vec![0, 1], 1, 1), vec![0]);
    }
}
