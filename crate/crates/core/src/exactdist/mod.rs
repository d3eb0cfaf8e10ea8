//! Exact finite-time distribution of the m-th particle from the Fredholm
//! determinant of the difference kernel.
//!
//! `prob_leq` integrates `det(I - lambda M) / prod_{k<m} (1 - lambda tau^k)`
//! over a circle in the `lambda` plane. `prob_gt` evaluates the same integral
//! by residues, which avoids computing a small tail as `1 - (1 - tail)`.

mod verify;

pub use verify::{verify_identities, CheckResult, IdentityReport};

use num_complex::Complex;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{param_err, AsepError, Result};
use crate::kernels::{k1_minus_k2_matrix, KernelContext};
use crate::params::AsepParams;
use crate::precision::{cr, root_of_unity, to_c64, Precision, Real, C};
use crate::quadrature::{circle_grid, det_lu, HessenbergPencil, KernelMatrix, NystromGrid};
use crate::with_precision;

type C64 = Complex<f64>;

/// Largest `m` and `t` accepted at double precision.
pub const DOUBLE_MAX_M: u32 = 8;
pub const DOUBLE_MAX_T: f64 = 30.0;
/// Cap on `lambda` nodes; each costs `O(n_eta^2)`.
const LAMBDA_CAP: usize = 8192;

/// Nodes predicted for trapezoid error `e^{-32}` on the `eta` circle of
/// radius `r`, from the part of the kernel through `phi(tau eta)` (essential
/// singularity at `1/tau`) and from the part through `phi(eta')` (bounded
/// outside the unit circle, so geometric at rate `1/r`).
fn predicted_nodes(tau: f64, t: f64, r: f64) -> (f64, f64) {
    let d0 = 1.0 - tau * r;
    let sa = (t.sqrt() + (t + 32.0 * d0).sqrt()) / d0;
    (tau * r * sa * sa, 32.0 / r.ln())
}

/// Radius where the two predictions of `predicted_nodes` meet.
fn balanced_radius(tau: f64, t: f64) -> f64 {
    let (mut lo, mut hi) = (1.0, 1.0 / tau);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        let (n1, n2) = predicted_nodes(tau, t, mid);
        if n1 > n2 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// `min(1.5, (1 + 1/tau)/2, 1 + 1/t, r_bal)` where `r_bal` balances the node
/// counts of `predicted_nodes`. The `1 + 1/t` term limits the growth of
/// `phi(tau eta)`, which is a rounding rather than a resolution problem.
pub fn auto_eta_radius(tau: f64, t: f64) -> f64 {
    let r = 1.5f64.min(0.5 * (1.0 + 1.0 / tau)).min(1.0 + 1.0 / t);
    if tau > 0.0 {
        r.min(balanced_radius(tau, t))
    } else {
        r
    }
}

/// How the `eta` circle radius is chosen.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize, Default)]
pub enum RadiusPolicy {
    /// See [`auto_eta_radius`].
    #[default]
    Auto,
    Fixed(f64),
}

/// Discretization and precision settings for the exact evaluator.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct NumericsConfig {
    pub n_eta: usize,
    pub n_lambda: usize,
    pub radius: RadiusPolicy,
    pub precision: Precision,
    /// Absolute tolerance between successive doublings of `prob_leq`.
    pub tol: f64,
    /// Relative tolerance between successive doublings of `prob_gt`.
    pub rel_tol: f64,
    /// Largest imaginary part tolerated in a probability.
    pub imag_tol: f64,
    pub node_cap: usize,
    /// Double node counts until stable; otherwise evaluate once.
    pub auto_double: bool,
}

impl Default for NumericsConfig {
    fn default() -> Self {
        NumericsConfig {
            n_eta: crate::quadrature::DEFAULT_CONTOUR_NODES,
            n_lambda: 64,
            radius: RadiusPolicy::Auto,
            precision: Precision::P53,
            tol: 1e-10,
            rel_tol: 1e-8,
            imag_tol: 1e-6,
            node_cap: crate::quadrature::NODE_CAP,
            auto_double: true,
        }
    }
}

impl NumericsConfig {
    pub fn with_precision(mut self, precision: Precision) -> Self {
        self.precision = precision;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_eta < 4 || self.n_eta > self.node_cap {
            return param_err(format!("n_eta = {} outside [4, {}]", self.n_eta, self.node_cap));
        }
        if self.n_lambda < 4 || self.n_lambda % 2 != 0 {
            return param_err(format!("n_lambda = {} must be even and at least 4", self.n_lambda));
        }
        if !(self.tol > 0.0 && self.rel_tol > 0.0 && self.imag_tol > 0.0) {
            return param_err("tolerances must be positive");
        }
        Ok(())
    }

    /// Radius of the `eta` circle, which must lie in `(1, 1/tau)`.
    pub fn eta_radius(&self, tau: f64, t: f64) -> Result<f64> {
        let r = match self.radius {
            RadiusPolicy::Auto => auto_eta_radius(tau, t),
            RadiusPolicy::Fixed(r) => r,
        };
        if !(r > 1.0 && r * tau < 1.0) {
            return param_err(format!("eta radius {r} outside (1, {})", 1.0 / tau));
        }
        Ok(r)
    }
}

/// One value of `P(x_m(t/gamma) <= x)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistributionPoint {
    pub m: u32,
    pub x: i64,
    /// Formula time; physical time is `t / gamma`.
    pub t: f64,
    /// Probability clamped to `[0, 1]`.
    pub prob: f64,
    /// Larger of the last doubling changes, the discarded imaginary part and
    /// the clamping adjustment.
    pub err_est: f64,
    /// Real part before clamping.
    pub raw: f64,
    pub imag: f64,
    pub n_eta: usize,
    pub n_lambda: usize,
    pub bits: u32,
}

/// One value of the tail `P(x_m(t/gamma) > x)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TailPoint {
    pub m: u32,
    pub x: i64,
    pub t: f64,
    pub value: f64,
    pub err_est: f64,
    pub n_eta: usize,
    pub bits: u32,
}

fn check_inputs(params: &AsepParams, m: u32, t: f64, cfg: &NumericsConfig) -> Result<f64> {
    let tau = params.tau_open()?;
    cfg.validate()?;
    if m == 0 {
        return param_err("particle index m must be at least 1");
    }
    if !(t > 0.0 && t.is_finite()) {
        return param_err(format!("time must be positive, got {t}"));
    }
    if !cfg.precision.is_extended() && (m > DOUBLE_MAX_M || t > DOUBLE_MAX_T) {
        return param_err(format!(
            "m = {m}, t = {t} exceeds the double-precision range (m <= {DOUBLE_MAX_M}, \
             t <= {DOUBLE_MAX_T}); request 106 or more bits"
        ));
    }
    Ok(tau)
}

fn tau_t<T: Real>(params: &AsepParams) -> T {
    T::from_f64(params.p) / T::from_f64(params.q)
}

fn difference_matrix<T: Real>(ctx: &KernelContext, r: f64, n: usize) -> Result<KernelMatrix<T>> {
    let grid: NystromGrid<T> = circle_grid(C64::zero(), r, 1, n)?;
    k1_minus_k2_matrix(ctx, &grid)
}

/// `(1/n) sum_j det(I - lambda_j M) / prod_{k<m}(1 - lambda_j tau^k)` over
/// `lambda_j = rho e^{2 pi i j / n}`.
fn lambda_sum<T: Real>(pencil: &HessenbergPencil<T>, tau: T, m: u32, rho: f64, n: usize) -> C<T> {
    let mut sum = cr(T::zero());
    for j in 0..n {
        let lam = root_of_unity::<T>(j, n) * T::from_f64(rho);
        let mut den = cr(T::one());
        let mut tk = T::one();
        for _ in 0..m {
            den = den * (cr(T::one()) - lam * tk);
            tk *= tau;
        }
        sum = sum + pencil.det(lam) / den;
    }
    sum / T::from_f64(n as f64)
}

/// Radius of the `lambda` circle: geometric mean of the last enclosed pole
/// `tau^{-(m-1)}` and the first excluded one `tau^{-m}`.
pub fn lambda_radius(tau: f64, m: u32) -> f64 {
    tau.powf(-(m as f64 - 0.5))
}

struct LeqEval {
    value: C64,
    n_lambda: usize,
    delta_lambda: f64,
}

fn leq_at<T: Real>(
    ctx: &KernelContext,
    r: f64,
    rho: f64,
    n_eta: usize,
    cfg: &NumericsConfig,
) -> Result<LeqEval> {
    let m = difference_matrix::<T>(ctx, r, n_eta)?;
    let pencil = HessenbergPencil::new(&m)?;
    let tau = tau_t::<T>(&ctx.params);
    let mut n = cfg.n_lambda;
    let mut prev = to_c64(lambda_sum(&pencil, tau, ctx.m, rho, n));
    if !cfg.auto_double {
        return Ok(LeqEval { value: prev, n_lambda: n, delta_lambda: 0.0 });
    }
    let mut d = f64::NAN;
    loop {
        let next_n = 2 * n;
        if next_n > LAMBDA_CAP {
            return Err(AsepError::Numerical(format!(
                "lambda quadrature did not settle below {LAMBDA_CAP} nodes (last change {d:.3e}); \
                 rounding noise at {} bits may exceed the tolerance, more bits may help",
                cfg.precision.bits()
            )));
        }
        let next = to_c64(lambda_sum(&pencil, tau, ctx.m, rho, next_n));
        d = (next - prev).norm();
        n = next_n;
        if d <= cfg.tol {
            return Ok(LeqEval { value: next, n_lambda: n, delta_lambda: d });
        }
        prev = next;
    }
}

/// `P(x_m(t/gamma) <= x)` with `t` in formula time.
pub fn prob_leq(params: &AsepParams, m: u32, x: i64, t: f64, cfg: &NumericsConfig) -> Result<DistributionPoint> {
    let tau = check_inputs(params, m, t, cfg)?;
    let bits = cfg.precision.bits();
    if x >= m as i64 {
        return Ok(DistributionPoint {
            m, x, t, prob: 1.0, err_est: 0.0, raw: 1.0, imag: 0.0, n_eta: 0, n_lambda: 0, bits,
        });
    }
    let ctx = KernelContext::new(*params, m, x, t)?;
    let r = cfg.eta_radius(tau, t)?;
    let rho = lambda_radius(tau, m);
    let eval = |n_eta: usize| -> Result<LeqEval> {
        with_precision!(cfg.precision, T => leq_at::<T>(&ctx, r, rho, n_eta, cfg))
    };
    let mut n_eta = cfg.n_eta;
    let mut cur = eval(n_eta)?;
    let mut delta_eta = 0.0;
    if cfg.auto_double {
        loop {
            if 2 * n_eta > cfg.node_cap {
                return Err(AsepError::Numerical(format!(
                    "eta quadrature did not settle below {} nodes (last change {:.3e})",
                    cfg.node_cap,
                    delta_eta
                )));
            }
            let next = eval(2 * n_eta)?;
            delta_eta = (next.value - cur.value).norm();
            n_eta *= 2;
            cur = next;
            if delta_eta <= cfg.tol {
                break;
            }
        }
    }
    finish_point(m, x, t, cur.value, delta_eta.max(cur.delta_lambda), n_eta, cur.n_lambda, bits, cfg)
}

#[allow(clippy::too_many_arguments)]
fn finish_point(
    m: u32,
    x: i64,
    t: f64,
    value: C64,
    delta: f64,
    n_eta: usize,
    n_lambda: usize,
    bits: u32,
    cfg: &NumericsConfig,
) -> Result<DistributionPoint> {
    if !value.re.is_finite() {
        return Err(AsepError::Numerical("non-finite probability".into()));
    }
    if value.im.abs() > cfg.imag_tol {
        return Err(AsepError::Numerical(format!(
            "imaginary part {:.3e} exceeds {:.1e}",
            value.im, cfg.imag_tol
        )));
    }
    let prob = value.re.clamp(0.0, 1.0);
    let err_est = delta.max(value.im.abs()).max((prob - value.re).abs());
    Ok(DistributionPoint { m, x, t, prob, err_est, raw: value.re, imag: value.im, n_eta, n_lambda, bits })
}

/// Residue sum `sum_{j<m} det(I - tau^{-j} M) / prod_{k != j, k<m} (1 - tau^{k-j})`.
fn residue_tail<T: Real>(ctx: &KernelContext, r: f64, n_eta: usize) -> Result<C64> {
    let mat = difference_matrix::<T>(ctx, r, n_eta)?;
    let tau = tau_t::<T>(&ctx.params);
    let m = ctx.m as i64;
    let mut sum = cr(T::zero());
    let one = T::one();
    for j in 0..m {
        let lam = cr(one / pow_t(tau, j));
        let d = det_lu(&mat.identity_minus(lam))?;
        let mut den = one;
        for k in 0..m {
            if k != j {
                let tk = if k > j { pow_t(tau, k - j) } else { one / pow_t(tau, j - k) };
                den *= one - tk;
            }
        }
        sum = sum + d / den;
    }
    Ok(to_c64(sum))
}

fn pow_t<T: Real>(x: T, n: i64) -> T {
    let mut acc = T::one();
    for _ in 0..n {
        acc *= x;
    }
    acc
}

/// `P(x_m(t/gamma) > x)` by residues; accurate in relative terms even when
/// the tail is far below double-precision resolution of `1 - prob_leq`.
pub fn prob_gt(params: &AsepParams, m: u32, x: i64, t: f64, cfg: &NumericsConfig) -> Result<TailPoint> {
    let tau = check_inputs(params, m, t, cfg)?;
    let bits = cfg.precision.bits();
    if x >= m as i64 {
        return Ok(TailPoint { m, x, t, value: 0.0, err_est: 0.0, n_eta: 0, bits });
    }
    let ctx = KernelContext::new(*params, m, x, t)?;
    let r = cfg.eta_radius(tau, t)?;
    let eval = |n: usize| -> Result<C64> {
        with_precision!(cfg.precision, T => residue_tail::<T>(&ctx, r, n))
    };
    let mut n = cfg.n_eta;
    let mut cur = eval(n)?;
    let mut delta = 0.0;
    if cfg.auto_double {
        loop {
            if 2 * n > cfg.node_cap {
                return Err(AsepError::Numerical(format!(
                    "tail did not settle below {} nodes (relative change {:.3e})",
                    cfg.node_cap,
                    delta / cur.norm()
                )));
            }
            let next = eval(2 * n)?;
            delta = (next - cur).norm();
            n *= 2;
            cur = next;
            if delta <= cfg.rel_tol * cur.norm() || delta <= 1e-300 {
                break;
            }
        }
    }
    if !cur.re.is_finite() {
        return Err(AsepError::Numerical("non-finite tail".into()));
    }
    if cur.im.abs() > cfg.imag_tol.min(1e-3 * cur.re.abs().max(1e-300)) && cur.im.abs() > delta {
        return Err(AsepError::Numerical(format!("tail has imaginary part {:.3e}", cur.im)));
    }
    Ok(TailPoint { m, x, t, value: cur.re, err_est: delta.max(cur.im.abs()), n_eta: n, bits })
}

/// `P(x_1(t/gamma) > x) = det(I - M)`.
pub fn prob_gt_first(params: &AsepParams, x: i64, t: f64, cfg: &NumericsConfig) -> Result<TailPoint> {
    prob_gt(params, 1, x, t, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::make_params;

    #[test]
    fn vanishing_region() {
        let a = make_params(0.3).unwrap();
        let cfg = NumericsConfig::default();
        let pt = prob_leq(&a, 2, 2, 1.0, &cfg).unwrap();
        assert_eq!(pt.prob, 1.0);
        assert_eq!(prob_gt_first(&a, 1, 1.0, &cfg).unwrap().value, 0.0);
    }

    #[test]
    fn tiny_time() {
        let a = make_params(0.3).unwrap();
        let pt = prob_leq(&a, 2, 1, 1e-6, &NumericsConfig::default()).unwrap();
        assert!(pt.prob < 1e-5, "{pt:?}");
    }

    #[test]
    fn complementary_first_particle() {
        let a = make_params(0.3).unwrap();
        let cfg = NumericsConfig::default();
        let leq = prob_leq(&a, 1, -1, 1.0, &cfg).unwrap();
        let gt = prob_gt_first(&a, -1, 1.0, &cfg).unwrap();
        assert!((leq.prob + gt.value - 1.0).abs() < 1e-8);
    }

    #[test]
    fn residues_match_contour() {
        let a = make_params(0.2).unwrap();
        let cfg = NumericsConfig::default();
        for (m, x) in [(2, 0), (3, 1), (3, -1)] {
            let leq = prob_leq(&a, m, x, 1.5, &cfg).unwrap();
            let gt = prob_gt(&a, m, x, 1.5, &cfg).unwrap();
            assert!((leq.raw + gt.value - 1.0).abs() < 1e-9, "m={m} x={x}");
        }
    }

    #[test]
    fn double_precision_range_enforced() {
        let a = make_params(0.3).unwrap();
        let cfg = NumericsConfig::default();
        assert!(matches!(prob_leq(&a, 9, 0, 1.0, &cfg), Err(AsepError::Parameter(_))));
        assert!(matches!(prob_leq(&a, 2, 0, 31.0, &cfg), Err(AsepError::Parameter(_))));
        assert!(prob_leq(&make_params(0.5).unwrap(), 1, 0, 1.0, &cfg).is_err());
    }

    #[test]
    fn radius_policy() {
        let cfg = NumericsConfig::default();
        assert_eq!(cfg.eta_radius(0.3, 1.0).unwrap(), 1.5);
        assert!((cfg.eta_radius(0.3, 10.0).unwrap() - 1.1).abs() < 1e-15);
        let bad = NumericsConfig { radius: RadiusPolicy::Fixed(4.0), ..cfg };
        assert!(bad.eta_radius(0.3, 1.0).is_err());
    }
}
