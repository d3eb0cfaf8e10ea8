use rand::Rng;
use rand_distr::{Distribution, Exp1};

/// Last-passage time `G(m, k)` over an `m x k` grid of rate-1 exponential
/// weights. For TASEP from the step configuration, particle `m` has made `k`
/// jumps by time `t` exactly when `G(m, k) <= t`, so
/// `P(x_m(t) <= m - k) = P(G(m, k) <= t)`.
pub fn tasep_lpp_time<R: Rng>(m: usize, k: usize, rng: &mut R) -> f64 {
    let mut row = vec![0.0f64; k];
    for _ in 0..m {
        let mut left = 0.0f64;
        for g in row.iter_mut() {
            let w: f64 = Exp1.sample(rng);
            *g = g.max(left) + w;
            left = *g;
        }
    }
    row.last().copied().unwrap_or(0.0)
}
