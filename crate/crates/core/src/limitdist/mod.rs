//! Large-time laws: the fixed-`m` tail asymptotic, the Gaussian-kernel
//! crossover family, and the GUE Tracy-Widom distribution.

use num_complex::Complex;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{param_err, AsepError, Result};
use crate::exactdist::lambda_radius;
use crate::kernels::{airy_ai, airy_kernel_closed, euler_product, mehler_kernel};
use crate::params::{scaling_constants, AsepParams};
use crate::precision::root_of_unity;
use crate::quadrature::{discretize_symmetric, fredholm_det, interval_grid, HessenbergPencil, KernelMatrix};

type C64 = Complex<f64>;

/// Which law a table holds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Law {
    Thm1,
    Crossover,
    F2,
}

/// A law tabulated on a grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CdfTable {
    pub law: Law,
    pub s_grid: Vec<f64>,
    pub values: Vec<f64>,
    pub err_est: Vec<f64>,
    /// `p`, `m` and numerical settings behind the values.
    pub params_used: serde_json::Value,
}

impl CdfTable {
    /// Nondecreasing within `slack` and inside `[0, 1]`.
    pub fn is_cdf(&self, slack: f64) -> bool {
        self.values.iter().all(|v| (-slack..=1.0 + slack).contains(v))
            && self.values.windows(2).all(|w| w[1] >= w[0] - slack)
    }
}

/// Value of the fixed-`m` tail asymptotic.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TailAsymptotic {
    pub value: f64,
    /// Set when `x >= m`, where the tail is exactly zero.
    pub vanishes: bool,
}

fn factorial(n: u64) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// `prod_{k>=1}(1 - tau^k) t^{2m-x-2} e^{-t} / ((m-1)! (m-x-1)!)`, the
/// large-`t` form of `P(x_m(t/gamma) > x)`. Not clamped; exceeds 1 at small `t`.
pub fn theorem1_tail(params: &AsepParams, m: u32, x: i64, t: f64) -> Result<TailAsymptotic> {
    let tau = params.tau_open()?;
    if m == 0 {
        return param_err("particle index m must be at least 1");
    }
    if !(t > 0.0) {
        return param_err(format!("time must be positive, got {t}"));
    }
    let m = m as i64;
    if x >= m {
        return Ok(TailAsymptotic { value: 0.0, vanishes: true });
    }
    let euler = euler_product(tau, 1e-17)?;
    let power = (2 * m - x - 2) as f64;
    let log = power * t.ln() - t;
    let value = euler * log.exp() / (factorial((m - 1) as u64) * factorial((m - x - 1) as u64));
    Ok(TailAsymptotic { value, vanishes: false })
}

/// Numerical settings for the interval determinants.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LimitConfig {
    /// Gauss-Legendre nodes on the truncated interval.
    pub n: usize,
    /// Length of the Airy-kernel interval `(s, s + trunc)`.
    pub airy_trunc: f64,
    /// Number of Gaussian decay lengths `1/gamma` kept on the crossover interval.
    pub gauss_lengths: f64,
    pub n_lambda: usize,
    pub tol: f64,
}

impl Default for LimitConfig {
    fn default() -> Self {
        LimitConfig { n: 80, airy_trunc: 16.0, gauss_lengths: 8.0, n_lambda: 64, tol: 1e-12 }
    }
}

/// Value with an error estimate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LimitValue {
    pub value: f64,
    pub err_est: f64,
}

fn std_normal_sf(z: f64) -> f64 {
    0.5 * libm::erfc(z / std::f64::consts::SQRT_2)
}

/// Symmetrized Nystrom matrix of the Gaussian kernel on `(a, z)`, plus the
/// mass of the kernel diagonal beyond `z` as a truncation bound.
fn mehler_matrix(params: &AsepParams, a: f64, cfg: &LimitConfig) -> Result<(KernelMatrix<f64>, f64)> {
    let g = params.gamma;
    if !(g > 0.0) {
        return param_err("the Gaussian kernel needs p < q");
    }
    let z = a.max(0.0) + cfg.gauss_lengths / g;
    let grid = interval_grid(a, z, cfg.n)?;
    let k = mehler_kernel(params);
    let mat = discretize_symmetric(k, &grid)?;
    // int_z^inf q/sqrt(2 pi) e^{-gamma^2 u^2 / 2} du
    let tail = params.q / g * std_normal_sf(g * z);
    Ok((mat, tail))
}

/// `det(I - K chi_{(s, inf)})` for the Gaussian kernel: the limit of
/// `P(x_1 > -t + sqrt(gamma t) (-s))` in the diffusive scaling.
pub fn crossover_tail_first(params: &AsepParams, s: f64, cfg: &LimitConfig) -> Result<LimitValue> {
    let (mat, tail) = mehler_matrix(params, s, cfg)?;
    let d = fredholm_det(&mat, C64::new(1.0, 0.0))?;
    Ok(LimitValue { value: d.re, err_est: tail + d.im.abs() })
}

/// Limit of `P((x_m(t/gamma) + t) / sqrt(gamma t) <= s)`:
/// the `lambda` integral of `det(I - lambda K chi_{(-s, inf)}) / prod_{k<m}(1 - lambda tau^k)`.
pub fn crossover_cdf(params: &AsepParams, m: u32, s: f64, cfg: &LimitConfig) -> Result<LimitValue> {
    let tau = params.tau_open()?;
    if m == 0 {
        return param_err("particle index m must be at least 1");
    }
    if m == 1 {
        let t = crossover_tail_first(params, -s, cfg)?;
        return Ok(LimitValue { value: (1.0 - t.value).clamp(0.0, 1.0), err_est: t.err_est });
    }
    let (mat, tail) = mehler_matrix(params, -s, cfg)?;
    let pencil = HessenbergPencil::new(&mat)?;
    let rho = lambda_radius(tau, m);
    let sum = |n: usize| -> C64 {
        let mut acc = C64::zero();
        for j in 0..n {
            let lam = root_of_unity::<f64>(j, n) * rho;
            let den: C64 = (0..m).map(|k| 1.0 - lam * tau.powi(k as i32)).product();
            acc += pencil.det(lam) / den;
        }
        acc / n as f64
    };
    let mut n = cfg.n_lambda;
    let mut prev = sum(n);
    loop {
        n *= 2;
        if n > 8192 {
            return Err(AsepError::Numerical("crossover lambda quadrature did not settle".into()));
        }
        let next = sum(n);
        let d = (next - prev).norm();
        prev = next;
        if d <= cfg.tol {
            // The tail bound enters through every enclosed pole.
            let scale: f64 = (0..m).map(|j| tau.powi(-(j as i32))).sum();
            return Ok(LimitValue {
                value: prev.re.clamp(0.0, 1.0),
                err_est: d + prev.im.abs() + tail * scale,
            });
        }
    }
}

/// `F_2(s) = det(I - K_Airy chi_{(s, s + L)})`, by Gauss-Legendre on the
/// truncated interval with the closed-form Airy kernel.
pub fn f2_cdf(s: f64, cfg: &LimitConfig) -> Result<LimitValue> {
    if !(-8.0..=10.0).contains(&s) {
        return param_err(format!("F2 is evaluated on [-8, 10], got {s}"));
    }
    let end = s + cfg.airy_trunc;
    let grid = interval_grid(s, end, cfg.n)?;
    let k = |a: f64, b: f64| airy_kernel_closed(a, b).unwrap_or(f64::NAN);
    let mat = discretize_symmetric(k, &grid)?;
    let d = fredholm_det(&mat, C64::new(1.0, 0.0))?;
    // Trace of the kernel beyond the cut bounds the neglected part.
    let ae = airy_ai(end)?;
    let tail = ae * ae;
    Ok(LimitValue { value: d.re.clamp(0.0, 1.0), err_est: tail + d.im.abs() })
}

/// Lattice point for a cube-root-scaled comparison.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScaledPoint {
    pub m: u32,
    pub x: i64,
    /// `s` realized after rounding `x` to the lattice.
    pub s_prime: f64,
}

/// `m = round(sigma t)`, `x = round(c1 t + c2 s t^{1/3})`, with `t` in formula
/// time, and the realized `s' = (x - c1 t) / (c2 t^{1/3})`.
pub fn theorem3_map(params: &AsepParams, sigma: f64, t: f64, s: f64) -> Result<ScaledPoint> {
    if params.gamma <= 0.0 {
        return param_err("the scaling needs p < q");
    }
    if !(t > 0.0) {
        return param_err(format!("time must be positive, got {t}"));
    }
    let c = scaling_constants(sigma)?;
    let m = (sigma * t).round();
    if m < 1.0 {
        return param_err(format!("sigma t = {} rounds below 1", sigma * t));
    }
    let scale = c.c2 * t.cbrt();
    let x = (c.c1 * t + scale * s).round();
    Ok(ScaledPoint { m: m as u32, x: x as i64, s_prime: (x - c.c1 * t) / scale })
}

/// Tabulate `f` over a grid, in order.
pub fn tabulate(
    law: Law,
    s_grid: &[f64],
    params_used: serde_json::Value,
    f: impl Fn(f64) -> Result<LimitValue>,
) -> Result<CdfTable> {
    let mut values = Vec::with_capacity(s_grid.len());
    let mut err_est = Vec::with_capacity(s_grid.len());
    for &s in s_grid {
        let v = f(s)?;
        values.push(v.value);
        err_est.push(v.err_est);
    }
    Ok(CdfTable { law, s_grid: s_grid.to_vec(), values, err_est, params_used })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::make_params;

    fn phi(s: f64) -> f64 {
        1.0 - std_normal_sf(s)
    }

    #[test]
    fn tail_asymptotic_boundaries() {
        let a = make_params(0.3).unwrap();
        let tau = a.tau.unwrap();
        let e = euler_product(tau, 1e-17).unwrap();
        let v = theorem1_tail(&a, 1, 0, 3.0).unwrap();
        assert!((v.value - e * (-3.0f64).exp()).abs() < 1e-15);
        let v = theorem1_tail(&a, 3, 2, 2.0).unwrap();
        assert!((v.value - e * 4.0 * (-2.0f64).exp() / 2.0).abs() < 1e-15);
        let z = theorem1_tail(&a, 2, 2, 2.0).unwrap();
        assert!(z.vanishes && z.value == 0.0);
    }

    #[test]
    fn crossover_first_particle_complement() {
        let a = make_params(0.3).unwrap();
        let cfg = LimitConfig::default();
        let c = crossover_cdf(&a, 1, 0.5, &cfg).unwrap().value;
        let t = crossover_tail_first(&a, -0.5, &cfg).unwrap().value;
        assert!((c + t - 1.0).abs() < 1e-8);
    }

    #[test]
    fn crossover_normal_limit() {
        let a = make_params(1e-6).unwrap();
        let cfg = LimitConfig::default();
        for s in [-1.0, 0.0, 1.0] {
            let v = crossover_cdf(&a, 1, s, &cfg).unwrap().value;
            assert!((v - phi(s)).abs() < 1e-4, "s={s}: {v}");
        }
    }

    #[test]
    fn crossover_full_mass() {
        let a = make_params(0.3).unwrap();
        let v = crossover_cdf(&a, 1, 8.0, &LimitConfig::default()).unwrap().value;
        assert!(v > 1.0 - 1e-6);
    }

    #[test]
    fn crossover_is_a_cdf_for_several_m() {
        let a = make_params(0.3).unwrap();
        let cfg = LimitConfig::default();
        // Tails decay on the scale 1/gamma, so the grid spans [-16, 16].
        let grid: Vec<f64> = (-32..=32).map(|i| i as f64 * 0.5).collect();
        for m in 1..=3 {
            let tab = tabulate(Law::Crossover, &grid, serde_json::json!({"m": m}), |s| crossover_cdf(&a, m, s, &cfg)).unwrap();
            assert!(tab.is_cdf(1e-6), "m={m}: {:?}", tab.values);
            assert!(tab.values[0] < 1e-6 && tab.values[64] > 1.0 - 1e-6, "m={m}: {} {}", tab.values[0], tab.values[64]);
        }
        // At s = -8 the first particle still carries visible mass.
        let v = crossover_cdf(&a, 1, -8.0, &cfg).unwrap().value;
        assert!((v - 0.001_202_402_027_432_381).abs() < 1e-9, "{v}");
    }

    #[test]
    fn f2_reference_values() {
        // Frozen from the n = 160, L = 24 evaluation.
        let refs = [
            (-6.0, 1.062_254_674_264_491_4e-8),
            (-4.0, 0.003_544_553_595_510_581),
            (-2.0, 0.413_224_142_505_114_47),
            (0.0, 0.969_372_828_355_261_3),
            (2.0, 0.999_887_553_698_309_2),
        ];
        let cfg = LimitConfig::default();
        for (s, want) in refs {
            let v = f2_cdf(s, &cfg).unwrap().value;
            assert!((v - want).abs() < 1e-12, "s={s}: {v}");
        }
        assert!((f2_cdf(10.0, &cfg).unwrap().value - 1.0).abs() < 1e-10);
        assert!(f2_cdf(-9.0, &cfg).is_err());
    }

    #[test]
    fn scaled_lattice_point() {
        let a = make_params(0.0).unwrap();
        let pt = theorem3_map(&a, 0.25, 1000.0, 1.0).unwrap();
        assert_eq!((pt.m, pt.x), (250, 8));
        let c2 = 2f64.powf(-1.0 / 3.0);
        assert!((pt.s_prime - 8.0 / (c2 * 10.0)).abs() < 1e-12);
        assert_eq!(theorem3_map(&a, 0.25, 37.0, 0.0).unwrap().x, 0);
        assert!(theorem3_map(&a, 0.25, 1.0, 0.0).is_err());
    }
}
