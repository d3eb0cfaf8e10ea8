use num_complex::Complex;
use num_traits::{One, Zero};

use crate::error::{param_err, AsepError, Result};
use crate::params::AsepParams;
use crate::precision::{cabs_f64, cexp, cinv, cpowi, cr, Real, C};
use crate::quadrature::{circle_grid, KernelMatrix, NystromGrid};

use super::KernelContext;

type C64 = Complex<f64>;

/// `p / xi + q xi - 1`, the one-particle dispersion.
pub fn epsilon(params: &AsepParams, xi: C64) -> Result<C64> {
    if xi == C64::zero() {
        return param_err("epsilon is singular at xi = 0");
    }
    Ok(params.p / xi + params.q * xi - 1.0)
}

/// The kernel of the original large-circle representation,
/// `q xi'^x e^{eps(xi') t / gamma} / (p + q xi xi' - xi)`.
///
/// Returns NaN at a near-zero denominator so that discretization reports the
/// offending node pair.
pub fn kernel_k(ctx: &KernelContext) -> impl Fn(C64, C64) -> C64 + '_ {
    let p = ctx.params.p;
    let q = ctx.params.q;
    let s = ctx.t / ctx.params.gamma;
    move |xi, xip| {
        let den = p + q * xi * xip - xi;
        if den.norm() < 1e-12 * xi.norm().max(1e-300) {
            return C64::new(f64::NAN, f64::NAN);
        }
        let eps = p / xip + q * xip - 1.0;
        q * xip.powi(ctx.x as i32) * (eps * s).exp() / den
    }
}

/// Precomputed constants for the function
/// `phi(eta) = ((1 - tau eta) / (1 - eta))^x exp([1/(1 - eta) - 1/(1 - tau eta)] t)`
/// and its relatives.
#[derive(Clone, Copy, Debug)]
pub struct Phi<T: Real> {
    pub tau: T,
    pub x: i64,
    pub t: T,
}

impl<T: Real> Phi<T> {
    pub fn new(ctx: &KernelContext) -> Result<Self> {
        ctx.params.tau_lt_one()?;
        // p / q at working precision rather than the rounded double.
        let tau = T::from_f64(ctx.params.p) / T::from_f64(ctx.params.q);
        Ok(Phi { tau, x: ctx.x, t: T::from_f64(ctx.t) })
    }

    fn near_pole(eta: C<T>) -> bool {
        cabs_f64(cr::<T>(T::one()) - eta) < 1e-14
    }

    pub fn phi(&self, eta: C<T>) -> C<T> {
        let one = cr::<T>(T::one());
        let a = one - eta;
        let b = one - eta * self.tau;
        if Self::near_pole(eta) || cabs_f64(b) < 1e-14 {
            return Complex::new(T::from_f64(f64::NAN), T::from_f64(f64::NAN));
        }
        let ratio = cpowi(b / a, self.x);
        let expo = (cinv(a) - cinv(b)) * cr(self.t);
        ratio * cexp(expo)
    }

    /// Derivative of `phi`, used at the removable singularity of the
    /// difference-quotient kernel.
    pub fn dphi(&self, eta: C<T>) -> C<T> {
        let one = cr::<T>(T::one());
        let a = one - eta;
        let b = one - eta * self.tau;
        let tau = cr(self.tau);
        let x = cr(T::from_i64(self.x));
        let log_deriv = x * (cinv(a) - tau / b) + cr(self.t) * (cinv(a * a) - tau / (b * b));
        self.phi(eta) * log_deriv
    }

    /// `phi(eta) phi(tau eta) ... phi(tau^{n-1} eta)`.
    pub fn phi_n(&self, n: usize, eta: C<T>) -> C<T> {
        let mut acc = cr::<T>(T::one());
        let mut z = eta;
        for _ in 0..n {
            acc = acc * self.phi(z);
            z = z * self.tau;
        }
        acc
    }

    /// `(1 - eta)^{-x} e^{eta t / (1 - eta)}`, the limit of `phi_n`.
    pub fn phi_inf(&self, eta: C<T>) -> C<T> {
        let one = cr::<T>(T::one());
        let a = one - eta;
        if Self::near_pole(eta) {
            return Complex::new(T::from_f64(f64::NAN), T::from_f64(f64::NAN));
        }
        cpowi(a, -self.x) * cexp(eta / a * self.t)
    }
}

/// `1 / (eta' - tau eta)`.
pub fn kernel_k0<T: Real>(params: &AsepParams) -> Result<impl Fn(C<T>, C<T>) -> C<T>> {
    let tau = T::from_f64(params.tau_lt_one()?);
    Ok(move |eta: C<T>, etap: C<T>| cinv(etap - eta * tau))
}

/// `phi(tau eta) / (eta' - tau eta)`.
pub fn kernel_k1<T: Real>(ctx: &KernelContext) -> Result<impl Fn(C<T>, C<T>) -> C<T>> {
    let phi = Phi::<T>::new(ctx)?;
    Ok(move |eta: C<T>, etap: C<T>| {
        let te = eta * phi.tau;
        phi.phi(te) / (etap - te)
    })
}

/// `phi(eta') / (eta' - tau eta)`.
pub fn kernel_k2<T: Real>(ctx: &KernelContext) -> Result<impl Fn(C<T>, C<T>) -> C<T>> {
    let phi = Phi::<T>::new(ctx)?;
    Ok(move |eta: C<T>, etap: C<T>| phi.phi(etap) / (etap - eta * phi.tau))
}

/// `(phi(tau eta) - phi(eta')) / (eta' - tau eta)`, with the derivative at the
/// removable singularity `eta' = tau eta`.
pub fn kernel_k1_minus_k2<T: Real>(
    ctx: &KernelContext,
) -> Result<impl Fn(C<T>, C<T>) -> C<T>> {
    let phi = Phi::<T>::new(ctx)?;
    Ok(move |eta: C<T>, etap: C<T>| {
        let te = eta * phi.tau;
        let d = etap - te;
        if cabs_f64(d) < 1e-8 * cabs_f64(etap) {
            // Difference quotient tends to -phi'(tau eta).
            -phi.dphi(te)
        } else {
            (phi.phi(te) - phi.phi(etap)) / d
        }
    })
}

/// Nystrom matrix of the difference kernel on a circle, with each `phi`
/// evaluated once per node rather than once per entry.
pub fn k1_minus_k2_matrix<T: Real>(
    ctx: &KernelContext,
    grid: &NystromGrid<T>,
) -> Result<KernelMatrix<T>> {
    let phi = Phi::<T>::new(ctx)?;
    let n = grid.len();
    let tau = phi.tau;
    let te: Vec<C<T>> = grid.nodes.iter().map(|&z| z * tau).collect();
    let phi_te: Vec<C<T>> = te.iter().map(|&z| phi.phi(z)).collect();
    let phi_e: Vec<C<T>> = grid.nodes.iter().map(|&z| phi.phi(z)).collect();
    let mut m = KernelMatrix::zeros(n);
    for j in 0..n {
        for k in 0..n {
            let d = grid.nodes[k] - te[j];
            let v = if cabs_f64(d) < 1e-8 * cabs_f64(grid.nodes[k]) {
                -phi.dphi(te[j])
            } else {
                (phi_te[j] - phi_e[k]) / d
            };
            m.set(j, k, v * grid.weights[k]);
        }
    }
    if !m.is_finite() {
        return Err(AsepError::Numerical(
            "difference kernel overflowed; use a smaller radius or more precision".into(),
        ));
    }
    Ok(m)
}

/// Truncated resolvent series with a geometric tail estimate.
#[derive(Clone, Copy, Debug)]
pub struct SeriesValue {
    pub value: C64,
    pub tail_bound: f64,
    pub terms: usize,
}

/// `R(eta, eta') = sum_{n >= 1} lambda^n phi_n(tau eta) / (eta' - tau^n eta)`,
/// the kernel of `lambda (I - lambda K1)^{-1} K1` for small `lambda`.
pub fn resolvent_r(
    ctx: &KernelContext,
    lambda: C64,
    n_terms: usize,
) -> Result<impl Fn(C64, C64) -> Result<SeriesValue> + '_> {
    let phi = Phi::<f64>::new(ctx)?;
    Ok(move |eta: C64, etap: C64| {
        if lambda == C64::zero() {
            return Ok(SeriesValue { value: C64::zero(), tail_bound: 0.0, terms: 0 });
        }
        let tau = phi.tau;
        let mut sum = C64::zero();
        let mut phin = C64::one();
        let mut lam_n = C64::one();
        let mut tn = 1.0;
        let mut last = f64::INFINITY;
        let mut ratio = f64::INFINITY;
        for n in 1..=n_terms {
            // phi_n(tau eta) = phi_{n-1}(tau eta) * phi(tau^n eta)
            tn *= tau;
            phin *= phi.phi(eta * tn);
            lam_n *= lambda;
            let term = lam_n * phin / (etap - eta * tn);
            sum += term;
            let mag = term.norm();
            if n > 1 && last > 0.0 {
                ratio = mag / last;
            }
            last = mag;
        }
        let tail_bound = if ratio < 1.0 { last * ratio / (1.0 - ratio) } else { f64::INFINITY };
        if !tail_bound.is_finite() && n_terms > 1 {
            return Err(AsepError::Numerical(format!(
                "resolvent series is not contracting (term ratio {ratio:.3})"
            )));
        }
        Ok(SeriesValue { value: sum, tail_bound, terms: n_terms })
    })
}

/// `f(mu, z) = sum_{k in Z} tau^k z^k / (1 - tau^k mu)`, summed as the k >= 0
/// series plus an analytically continued k < 0 part, valid for
/// `tau < |z| < 1/tau`, `z != 1`.
pub fn f_mu(tau: f64, mu: C64, z: C64, tol: f64) -> Result<C64> {
    if !(tau > 0.0 && tau < 1.0) {
        return param_err("f(mu, z) needs 0 < tau < 1");
    }
    let az = z.norm();
    if !(az > tau && az < 1.0 / tau) {
        return param_err(format!("|z| = {az} outside ({tau}, {})", 1.0 / tau));
    }
    if (z - 1.0).norm() < 1e-12 {
        return param_err("z = 1 is a pole of f");
    }
    if mu == C64::zero() {
        return param_err("mu = 0 is excluded");
    }
    // Poles at mu = tau^k for all integer k.
    let k = (mu.norm().ln() / tau.ln()).round();
    let pole = tau.powf(k);
    if (mu - pole).norm() < 1e-6 * pole.max(1.0) {
        return param_err(format!("mu is within 1e-6 of the pole tau^{k}"));
    }
    let mut sum = C64::zero();
    // k >= 0: terms ~ (tau z)^k.
    let mut tk = 1.0;
    let mut zk = C64::one();
    let rho_pos = tau * az;
    for _ in 0..100_000 {
        let term = tk * zk / (1.0 - tk * mu);
        sum += term;
        let bound = term.norm() * rho_pos / (1.0 - rho_pos) * 2.0;
        if bound < tol * sum.norm().max(1.0) && tk * mu.norm() < 0.5 {
            break;
        }
        tk *= tau;
        zk *= z;
    }
    // k < 0, continued: -1/(mu (z - 1)) + sum_{j >= 1} tau^j z^{-j} / (mu (tau^j - mu)).
    sum -= 1.0 / (mu * (z - 1.0));
    let zi = 1.0 / z;
    let rho_neg = tau / az;
    let mut tj = 1.0;
    let mut zj = C64::one();
    for _ in 0..100_000 {
        tj *= tau;
        zj *= zi;
        let term = tj * zj / (mu * (tj - mu));
        sum += term;
        let bound = term.norm() * rho_neg / (1.0 - rho_neg) * 2.0;
        if bound < tol * sum.norm().max(1.0) && tj < 0.5 * mu.norm() {
            break;
        }
    }
    Ok(sum)
}

/// Which form of `mu f(mu, zeta / eta')` enters the J kernel.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum JForm {
    /// The series at `tau > 0`.
    Series,
    /// The `tau -> 0` limit `1/(1 - mu) + zeta / (eta' - zeta)`, for `p = 0`.
    TasepLimit,
    /// `eta' / (eta' - zeta)`: at `p = 0` the `mu` integral collapses and
    /// `det(I + J)` with this form is the probability itself.
    TasepProbability,
}

/// Radii used for the J kernel: `eta` on `r`, `zeta` on `rho`.
pub fn j_radii(tau: f64) -> (f64, f64) {
    let r = f64::max(0.9, 0.5 * (1.0 + tau));
    // Midpoint of (1, r/tau), capped so small tau does not push zeta far out.
    let rho = if tau > 0.0 { f64::min(0.5 * (1.0 + r / tau), 1.5) } else { 1.5 };
    (r, rho)
}

/// Nystrom matrix of `mu J` on the circle `|eta| = r`, where
/// `J(eta, eta') = \oint phi_inf(zeta)/phi_inf(eta') zeta^m / eta'^{m+1}
///                 f(mu, zeta/eta') / (zeta - eta) dzeta`
/// is computed with the trapezoid rule on `|zeta| = rho`.
///
/// Uses the same node count on both circles so that `zeta_l / eta'_k` depends
/// only on `l - k`, and `f` is evaluated just `n` times.
pub fn mu_j_matrix(
    ctx: &KernelContext,
    mu: C64,
    n: usize,
    form: JForm,
    radii: Option<(f64, f64)>,
) -> Result<KernelMatrix<f64>> {
    let tau = ctx.params.tau_lt_one()?;
    if form == JForm::Series && tau == 0.0 {
        return param_err("the series form of J needs tau > 0; use the TASEP limit");
    }
    let (r, rho) = radii.unwrap_or_else(|| j_radii(tau));
    if !(rho > 1.0) || (tau > 0.0 && !(rho < r / tau)) {
        return param_err(format!("zeta radius {rho} must lie in (1, r/tau)"));
    }
    let phi = Phi::<f64> { tau, x: ctx.x, t: ctx.t };
    let ge: NystromGrid<f64> = circle_grid(C64::zero(), r, 1, n)?;
    let gz: NystromGrid<f64> = circle_grid(C64::zero(), rho, 1, n)?;
    let m = ctx.m as i32;
    // mu f(mu, zeta_l / eta'_k) as a function of (l - k) mod n.
    let mut muf = Vec::with_capacity(n);
    for d in 0..n {
        let z = gz.nodes[d] / ge.nodes[0];
        let v = match form {
            JForm::Series => mu * f_mu(tau, mu, z, 1e-15)?,
            JForm::TasepLimit => {
                if (mu - 1.0).norm() < 1e-12 {
                    return param_err("mu = 1 is a pole of the TASEP-limit kernel");
                }
                1.0 / (1.0 - mu) + z / (1.0 - z)
            }
            JForm::TasepProbability => 1.0 / (1.0 - z),
        };
        muf.push(v);
    }
    let a: Vec<C64> = gz.nodes.iter().zip(&gz.weights).map(|(&z, &w)| w * phi.phi_inf(z) * z.powi(m)).collect();
    let mut out = KernelMatrix::zeros(n);
    for k in 0..n {
        let ep = ge.nodes[k];
        let pre = ge.weights[k] / (phi.phi_inf(ep) * ep.powi(m + 1));
        for j in 0..n {
            let e = ge.nodes[j];
            let mut s = C64::zero();
            for l in 0..n {
                s += a[l] * muf[(l + n - k) % n] / (gz.nodes[l] - e);
            }
            out.set(j, k, s * pre);
        }
    }
    if !out.is_finite() {
        return Err(AsepError::Numerical("J kernel overflowed".into()));
    }
    Ok(out)
}

/// Pointwise value of `J(eta, eta')` (not multiplied by `mu`) with an
/// `n_zeta`-point rule on `|zeta| = rho`.
pub fn kernel_j(
    ctx: &KernelContext,
    mu: C64,
    n_zeta: usize,
) -> Result<impl Fn(C64, C64) -> Result<C64> + '_> {
    let tau = ctx.params.tau_open()?;
    let (_, rho) = j_radii(tau);
    let gz: NystromGrid<f64> = circle_grid(C64::zero(), rho, 1, n_zeta)?;
    let phi = Phi::<f64> { tau, x: ctx.x, t: ctx.t };
    let m = ctx.m as i32;
    Ok(move |eta: C64, etap: C64| {
        let mut s = C64::zero();
        for (&z, &w) in gz.nodes.iter().zip(&gz.weights) {
            let f = f_mu(tau, mu, z / etap, 1e-15)?;
            s += w * phi.phi_inf(z) * z.powi(m) * f / (z - eta);
        }
        Ok(s / (phi.phi_inf(etap) * etap.powi(m + 1)))
    })
}
