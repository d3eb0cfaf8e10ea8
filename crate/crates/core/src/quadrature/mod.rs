//! Contour and interval discretizations, Nystrom matrices and Fredholm
//! determinants.

mod grid;
mod legendre;
mod matrix;

pub use grid::{circle_grid, interval_grid, Contour, IntervalGrid, NystromGrid};
pub use legendre::gauss_legendre;
pub use matrix::{
    det_lu, discretize, discretize_symmetric, fredholm_det, ordered_sum, trace_power,
    HessenbergPencil, KernelMatrix,
};

use crate::error::{AsepError, Result};

/// Default node count on circles.
pub const DEFAULT_CONTOUR_NODES: usize = 128;
/// Default Gauss-Legendre node count on intervals.
pub const DEFAULT_INTERVAL_NODES: usize = 80;
/// Node cap for automatic doubling.
pub const NODE_CAP: usize = 1024;

/// Outcome of a node-doubling loop.
#[derive(Clone, Copy, Debug)]
pub struct Converged<V> {
    pub value: V,
    /// Node count of the accepted evaluation.
    pub n: usize,
    /// Difference between the last two evaluations.
    pub delta: f64,
    /// Whether the tolerance was met before the cap.
    pub converged: bool,
}

/// Evaluate at `n0, 2 n0, ...` until successive values differ by at most `tol`
/// or `cap` is reached.
pub fn double_until_stable<V: Copy>(
    n0: usize,
    cap: usize,
    tol: f64,
    dist: impl Fn(&V, &V) -> f64,
    mut eval: impl FnMut(usize) -> Result<V>,
) -> Result<Converged<V>> {
    if n0 == 0 || n0 > cap {
        return Err(AsepError::Parameter(format!("bad node range {n0}..{cap}")));
    }
    let mut prev = eval(n0)?;
    let mut n = n0;
    loop {
        let next_n = n * 2;
        if next_n > cap {
            return Ok(Converged { value: prev, n, delta: f64::INFINITY, converged: false });
        }
        let next = eval(next_n)?;
        let d = dist(&prev, &next);
        n = next_n;
        if d <= tol {
            return Ok(Converged { value: next, n, delta: d, converged: true });
        }
        prev = next;
    }
}
