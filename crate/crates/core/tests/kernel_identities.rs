//! Determinant and series identities between the kernels, with both sides
//! computed numerically.

use asep::kernels::{
    k1_minus_k2_matrix, kernel_k, kernel_k1, kernel_k2, mu_j_matrix, resolvent_r, JForm,
    KernelContext,
};
use asep::params::make_params;
use asep::quadrature::{circle_grid, discretize, fredholm_det, KernelMatrix, NystromGrid};
use num_complex::Complex;

type C64 = Complex<f64>;

fn ctx(p: f64, m: u32, x: i64, t: f64) -> KernelContext {
    KernelContext::new(make_params(p).unwrap(), m, x, t).unwrap()
}

fn p_of_tau(tau: f64) -> f64 {
    tau / (1.0 + tau)
}

fn origin() -> C64 {
    C64::new(0.0, 0.0)
}

#[test]
fn large_circle_and_difference_kernel_agree() {
    let c = ctx(0.3, 1, 0, 1.0);
    let lam = C64::new(0.5, 0.0);
    let g: NystromGrid<f64> = circle_grid(origin(), 3.0, 1, 128).unwrap();
    let k = discretize(kernel_k(&c), &g).unwrap();
    let gam: NystromGrid<f64> = circle_grid(origin(), 1.5, 1, 128).unwrap();
    let m = k1_minus_k2_matrix(&c, &gam).unwrap();
    let a = fredholm_det(&k, lam).unwrap();
    let b = fredholm_det(&m, lam).unwrap();
    assert!((a - b).norm() < 1e-6, "{a} vs {b}");
    assert!((k.trace() - m.trace()).norm() < 1e-6);
}

#[test]
fn small_circle_about_one_matches_difference_kernel() {
    let c = ctx(0.3, 1, 1, 1.0);
    let lam = C64::new(0.7, 0.0);
    let small: NystromGrid<f64> = circle_grid(C64::new(1.0, 0.0), 0.3, -1, 256).unwrap();
    let k2 = discretize(kernel_k2::<f64>(&c).unwrap(), &small).unwrap();
    let gam: NystromGrid<f64> = circle_grid(origin(), 1.5, 1, 128).unwrap();
    let m = k1_minus_k2_matrix(&c, &gam).unwrap();
    let a = fredholm_det(&k2, lam).unwrap();
    let b = fredholm_det(&m, lam).unwrap();
    assert!((a - b).norm() < 1e-8, "{a} vs {b}");
}

#[test]
fn k1_determinant_is_a_product() {
    for &(tau, lam) in &[(0.3, 2.0), (0.5, -1.5), (0.2, 0.7)] {
        let c = ctx(p_of_tau(tau), 1, 1, 1.0);
        let g: NystromGrid<f64> = circle_grid(origin(), 1.5f64.min(0.5 * (1.0 + 1.0 / tau)), 1, 256).unwrap();
        let k1 = discretize(kernel_k1::<f64>(&c).unwrap(), &g).unwrap();
        let d = fredholm_det(&k1, C64::new(lam, 0.0)).unwrap();
        let prod: f64 = (0..200).map(|k| 1.0 - lam * tau.powi(k)).product();
        assert!((d - prod).norm() < 1e-8, "tau={tau}: {d} vs {prod}");
    }
}

#[test]
fn resolvent_series_matches_matrix_inverse() {
    let c = ctx(p_of_tau(0.3), 1, 0, 1.0);
    let lam = C64::new(0.2, 0.0);
    let n = 128;
    let g: NystromGrid<f64> = circle_grid(origin(), 1.5, 1, n).unwrap();
    let k1 = discretize(kernel_k1::<f64>(&c).unwrap(), &g).unwrap();
    let a = k1.identity_minus(lam);
    let res = a.solve(&k1.scale(lam)).unwrap();
    let series = resolvent_r(&c, lam, 80).unwrap();
    // Fixed pseudo-random node pairs.
    let mut s: u64 = 12345;
    for _ in 0..16 {
        s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        let j = (s >> 33) as usize % n;
        s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        let k = (s >> 33) as usize % n;
        let want = res.get(j, k) / g.weights[k];
        let got = series(g.nodes[j], g.nodes[k]).unwrap();
        assert!(got.tail_bound < 1e-12);
        assert!((got.value - want).norm() < 1e-8, "({j},{k}): {} vs {want}", got.value);
    }
}

#[test]
fn resolvent_leading_order() {
    let c = ctx(0.3, 1, 0, 1.0);
    let lam = C64::new(1e-6, 0.0);
    let r = resolvent_r(&c, lam, 1).unwrap();
    let k1 = kernel_k1::<f64>(&c).unwrap();
    let (e, ep) = (C64::new(0.2, 1.4), C64::new(-1.1, 0.6));
    let want = lam * k1(e, ep);
    assert!((r(e, ep).unwrap().value - want).norm() < 1e-5 * want.norm());
    let zero = resolvent_r(&c, origin(), 10).unwrap();
    assert_eq!(zero(e, ep).unwrap().value, origin());
}

/// Right side of the J-kernel identity:
/// `det(I - lambda (K1 - K2)) / prod_{k >= 0} (1 - lambda tau^k)` with
/// `lambda = tau^{-m} mu`.
fn rescaled_difference_det(c: &KernelContext, mu: C64, n: usize) -> C64 {
    let tau = c.params.tau.unwrap();
    let lam = mu * tau.powi(-(c.m as i32));
    let r = 1.5f64.min(0.5 * (1.0 + 1.0 / tau));
    let g: NystromGrid<f64> = circle_grid(origin(), r, 1, n).unwrap();
    let m = k1_minus_k2_matrix(c, &g).unwrap();
    let d = fredholm_det(&m, lam).unwrap();
    let prod: C64 = (0..400).map(|k| 1.0 - lam * tau.powi(k)).product();
    d / prod
}

fn det_plus(m: &KernelMatrix<f64>) -> C64 {
    fredholm_det(m, C64::new(-1.0, 0.0)).unwrap()
}

#[test]
fn j_kernel_determinant_identity() {
    let c = ctx(p_of_tau(0.4), 2, 0, 1.0);
    for th in [0.3, 1.7, 3.0] {
        let mu = C64::from_polar(2.0, th);
        let mj = mu_j_matrix(&c, mu, 128, JForm::Series, None).unwrap();
        let lhs = det_plus(&mj);
        let rhs = rescaled_difference_det(&c, mu, 128);
        assert!((lhs - rhs).norm() < 1e-6, "mu={mu}: {lhs} vs {rhs}");
    }
    let mj = mu_j_matrix(&c, origin(), 32, JForm::Series, None);
    // mu = 0 is excluded from f; the zero multiplier is the trivial determinant.
    assert!(mj.is_err());
}

#[test]
fn tasep_limit_is_linear_in_tau() {
    let m = 2;
    let mus = [C64::new(2.0, 0.0), C64::new(-2.0, 0.0), C64::new(0.0, 2.0)];
    let mut gaps = Vec::new();
    for &tau in &[1e-3, 1e-4] {
        let c = ctx(p_of_tau(tau), m, 0, 1.0);
        let mut worst: f64 = 0.0;
        for &mu in &mus {
            let a = det_plus(&mu_j_matrix(&c, mu, 96, JForm::Series, None).unwrap());
            let b = det_plus(&mu_j_matrix(&c, mu, 96, JForm::TasepLimit, None).unwrap());
            worst = worst.max((a - b).norm());
        }
        gaps.push(worst);
    }
    assert!(gaps[1] < 1e-4, "gap at tau=1e-4: {}", gaps[1]);
    let ratio = gaps[0] / gaps[1];
    assert!((5.0..20.0).contains(&ratio), "gap ratio {ratio}");
}

#[test]
fn tasep_probability_form() {
    // Continuous-time Markov chain value of P(x_2(1) <= 0) for TASEP.
    let c = ctx(0.0, 2, 0, 1.0);
    let mj = mu_j_matrix(&c, C64::new(0.5, 0.0), 192, JForm::TasepProbability, None).unwrap();
    let d = det_plus(&mj);
    assert!((d.re - 0.031_696_959_722_285_784).abs() < 1e-10, "{d}");
    assert!(d.im.abs() < 1e-12);
}
