use rand::Rng;
use rand_distr::{Distribution, Exp1};
use serde::{Deserialize, Serialize};

use crate::params::AsepParams;

/// Positions of the particles that have ever been able to move, plus the
/// clock. Particles beyond the stored prefix sit at their starting sites.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimState {
    pub positions: Vec<i64>,
    pub clock: f64,
    pub events: u64,
    /// Particle count limit, if the run used a frozen wall.
    pub cap: Option<usize>,
}

impl SimState {
    pub fn step() -> Self {
        SimState { positions: vec![1], clock: 0.0, events: 0, cap: None }
    }

    /// Position of particle `m` (1-based).
    pub fn position(&self, m: usize) -> i64 {
        if m <= self.positions.len() {
            self.positions[m - 1]
        } else {
            m as i64
        }
    }

    pub fn is_ordered(&self) -> bool {
        self.positions.windows(2).all(|w| w[0] < w[1])
            && self.positions.last().is_none_or(|&l| l <= self.positions.len() as i64)
    }
}

/// Particles grouped by jump rate so an event is drawn in O(1):
/// bucket 0 holds right-only movers (rate p), 1 left-only (rate q), 2 both (rate 1).
struct Buckets {
    members: [Vec<usize>; 3],
    /// `(bucket, slot)` per particle, or `None` when blocked both ways.
    slot: Vec<Option<(usize, usize)>>,
    rates: [f64; 3],
}

impl Buckets {
    fn new(p: f64, q: f64) -> Self {
        Buckets { members: [vec![], vec![], vec![]], slot: vec![], rates: [p, q, 1.0] }
    }

    fn total(&self) -> f64 {
        (0..3).map(|b| self.members[b].len() as f64 * self.rates[b]).sum()
    }

    fn remove(&mut self, i: usize) {
        if let Some((b, s)) = self.slot[i].take() {
            let last = self.members[b].pop().unwrap();
            if last != i {
                self.members[b][s] = last;
                self.slot[last] = Some((b, s));
            }
        }
    }

    fn set(&mut self, i: usize, bucket: Option<usize>) {
        if i >= self.slot.len() {
            self.slot.resize(i + 1, None);
        }
        if self.slot[i].map(|(b, _)| b) == bucket {
            return;
        }
        self.remove(i);
        if let Some(b) = bucket {
            if self.rates[b] > 0.0 {
                self.slot[i] = Some((b, self.members[b].len()));
                self.members[b].push(i);
            }
        }
    }

    fn draw<R: Rng>(&self, rng: &mut R, total: f64) -> (usize, usize) {
        let mut u = rng.random::<f64>() * total;
        for b in 0..3 {
            let w = self.members[b].len() as f64 * self.rates[b];
            if u < w || (b == 2 && !self.members[b].is_empty()) {
                let k = ((u / self.rates[b]) as usize).min(self.members[b].len() - 1);
                return (b, self.members[b][k]);
            }
            u -= w;
        }
        // Rounding pushed u past the last nonempty bucket.
        let b = (0..3).rev().find(|&b| !self.members[b].is_empty() && self.rates[b] > 0.0).unwrap();
        (b, *self.members[b].last().unwrap())
    }
}

struct Sim {
    x: Vec<i64>,
    cap: Option<usize>,
    buckets: Buckets,
}

impl Sim {
    /// Site of particle `i` (0-based), including the frozen tail.
    fn pos(&self, i: usize) -> i64 {
        self.x.get(i).copied().unwrap_or(i as i64 + 1)
    }

    fn bucket_of(&self, i: usize) -> Option<usize> {
        let xi = self.x[i];
        let left = i == 0 || self.x[i - 1] < xi - 1;
        let right = self.pos(i + 1) > xi + 1;
        match (right, left) {
            (true, true) => Some(2),
            (true, false) => Some(0),
            (false, true) => Some(1),
            (false, false) => None,
        }
    }

    fn refresh(&mut self, i: usize) {
        if i < self.x.len() {
            let b = self.bucket_of(i);
            self.buckets.set(i, b);
        }
    }

    /// Bring tail particles into the explicit prefix once their left site
    /// has opened up.
    fn extend(&mut self) {
        loop {
            let k = self.x.len();
            if self.cap.is_some_and(|c| k >= c) || self.x[k - 1] >= k as i64 {
                return;
            }
            self.x.push(k as i64 + 1);
            self.refresh(k);
            self.refresh(k - 1);
        }
    }
}

/// Rejection-free event-driven simulation from the step configuration up to
/// physical time `t_phys`. Each particle attempts right jumps at rate `p` and
/// left jumps at rate `q`; only unblocked attempts are ever drawn, which leaves
/// the law of the process unchanged.
///
/// With `cap = Some(n)` particle `n + 1` and beyond stay frozen, acting as a
/// wall; with `None` the infinite system is simulated exactly.
pub fn simulate_with<R: Rng>(params: &AsepParams, t_phys: f64, cap: Option<usize>, rng: &mut R) -> SimState {
    let (p, q) = (params.p, params.q);
    let mut sim = Sim { x: vec![1], cap, buckets: Buckets::new(p, q) };
    sim.refresh(0);
    sim.extend();
    let mut clock = 0.0;
    let mut events = 0u64;
    loop {
        let total = sim.buckets.total();
        if total <= 0.0 {
            break;
        }
        let dt: f64 = Exp1.sample(rng);
        clock += dt / total;
        if clock > t_phys {
            break;
        }
        let (b, i) = sim.buckets.draw(rng, total);
        let dir = match b {
            0 => 1,
            1 => -1,
            _ => {
                if rng.random::<f64>() < p {
                    1
                } else {
                    -1
                }
            }
        };
        sim.x[i] += dir;
        events += 1;
        debug_assert!(i == 0 || sim.x[i - 1] < sim.x[i]);
        debug_assert!(sim.pos(i + 1) > sim.x[i]);
        if i > 0 {
            sim.refresh(i - 1);
        }
        sim.refresh(i);
        sim.refresh(i + 1);
        if i + 1 == sim.x.len() {
            sim.extend();
        }
    }
    SimState { positions: sim.x, clock: t_phys, events, cap }
}
