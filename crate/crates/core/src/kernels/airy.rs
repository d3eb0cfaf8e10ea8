use num_traits::{One, Zero};

use crate::error::{param_err, Result};
use crate::precision::{DoubleDouble, MultiFloat, Real};
use crate::quadrature::interval_grid;

/// Supported argument range.
const AI_MIN: f64 = -20.0;
const AI_MAX: f64 = 40.0;
/// Switch from the Maclaurin series to the asymptotic expansions.
const SERIES_LIMIT: f64 = 9.0;

/// `Ai(0)` and `-Ai'(0)` as double-double.
const AI0: [f64; 2] = [0.3550280538878172, 2.05233632436212e-17];
const MINUS_DAI0: [f64; 2] = [0.2588194037928068, -2.522243111610832e-17];

fn check(x: f64) -> Result<()> {
    if !(AI_MIN..=AI_MAX).contains(&x) {
        return param_err(format!("Airy argument {x} outside [{AI_MIN}, {AI_MAX}]"));
    }
    Ok(())
}

/// Airy function of the first kind on `[-20, 40]`.
pub fn airy_ai(x: f64) -> Result<f64> {
    check(x)?;
    Ok(if x.abs() <= SERIES_LIMIT { maclaurin(x).0 } else { asymptotic(x).0 })
}

/// Derivative of the Airy function on `[-20, 40]`.
pub fn airy_ai_prime(x: f64) -> Result<f64> {
    check(x)?;
    Ok(if x.abs() <= SERIES_LIMIT { maclaurin(x).1 } else { asymptotic(x).1 })
}

/// `(Ai, Ai')` from the two power-series solutions, summed in double-double to
/// absorb the cancellation for positive `x`.
fn maclaurin(x: f64) -> (f64, f64) {
    type D = DoubleDouble;
    let xd = D::from_f64(x);
    let x3 = xd * xd * xd;
    let mut f = D::one();
    let mut g = xd;
    let mut df = D::zero();
    let mut dg = D::one();
    let mut tf = D::one();
    let mut tg = xd;
    let mut sf = xd * xd / D::from_f64(2.0);
    let mut sg = D::one();
    df += sf;
    for k in 1..200 {
        let kf = k as f64;
        tf = tf * x3 / D::from_f64((3.0 * kf - 1.0) * (3.0 * kf));
        tg = tg * x3 / D::from_f64((3.0 * kf) * (3.0 * kf + 1.0));
        sg = sg * x3 / D::from_f64((3.0 * kf) * (3.0 * kf - 2.0));
        sf = sf * x3 / D::from_f64((3.0 * kf) * (3.0 * kf + 2.0));
        f += tf;
        g += tg;
        dg += sg;
        df += sf;
        let small = [tf, tg, sf, sg].iter().all(|t| t.to_f64().abs() < 1e-34 * (1.0 + f.to_f64().abs()));
        if small {
            break;
        }
    }
    let c1 = MultiFloat::from_limbs(AI0);
    let c2 = MultiFloat::from_limbs(MINUS_DAI0);
    ((c1 * f - c2 * g).to_f64(), (c1 * df - c2 * dg).to_f64())
}

/// Coefficients `u_k` of the asymptotic series and the companions `v_k` for
/// the derivative.
fn uv(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut u = vec![1.0];
    let mut v = vec![1.0];
    for k in 1..n {
        let kf = k as f64;
        let next = u[k - 1] * (6.0 * kf - 5.0) * (6.0 * kf - 3.0) * (6.0 * kf - 1.0)
            / (216.0 * kf * (2.0 * kf - 1.0));
        u.push(next);
        v.push(-(6.0 * kf + 1.0) / (6.0 * kf - 1.0) * next);
    }
    (u, v)
}

/// Sums `sum_k c_k s^k` until the terms stop decreasing (optimal truncation).
fn truncated(c: &[f64], s: f64, stride: usize, offset: usize) -> f64 {
    let mut sum = 0.0;
    let mut prev = f64::INFINITY;
    let mut k = offset;
    let mut sign = 1.0;
    while k < c.len() {
        let term = c[k] * s.powi(k as i32);
        if term.abs() >= prev {
            break;
        }
        sum += sign * term;
        prev = term.abs();
        if term.abs() < 1e-18 * sum.abs() {
            break;
        }
        k += stride;
        sign = -sign;
    }
    sum
}

fn asymptotic(x: f64) -> (f64, f64) {
    let (u, v) = uv(40);
    let sqpi = std::f64::consts::PI.sqrt();
    let a = x.abs();
    let zeta = 2.0 / 3.0 * a.powf(1.5);
    let inv = 1.0 / zeta;
    if x > 0.0 {
        let su = truncated(&u, inv, 1, 0);
        let sv = truncated(&v, inv, 1, 0);
        let e = (-zeta).exp();
        let q = a.powf(0.25);
        (e / (2.0 * sqpi * q) * su, -q * e / (2.0 * sqpi) * sv)
    } else {
        let theta = zeta + std::f64::consts::FRAC_PI_4;
        let (s, c) = theta.sin_cos();
        let pu = truncated(&u, inv, 2, 0);
        let qu = truncated(&u, inv, 2, 1);
        let pv = truncated(&v, inv, 2, 0);
        let qv = truncated(&v, inv, 2, 1);
        let q = a.powf(0.25);
        ((s * pu - c * qu) / (sqpi * q), -q / sqpi * (c * pv + s * qv))
    }
}

/// Airy-kernel value with its truncation bound.
#[derive(Clone, Copy, Debug)]
pub struct AiryKernelValue {
    pub value: f64,
    pub tail_bound: f64,
}

/// `int_0^trunc Ai(z + x) Ai(z + y) dz` by Gauss-Legendre with `n` nodes.
pub fn airy_kernel(x: f64, y: f64, trunc: f64, n: usize) -> Result<AiryKernelValue> {
    if x < -10.0 || y < -10.0 {
        return param_err("airy_kernel needs x, y >= -10");
    }
    if !(trunc > 0.0) || trunc + x.max(y) > AI_MAX {
        return param_err(format!("truncation {trunc} out of range"));
    }
    let g = interval_grid(0.0, trunc, n)?;
    let mut s = 0.0;
    for (&z, &w) in g.nodes.iter().zip(&g.weights) {
        s += w * airy_ai(z + x)? * airy_ai(z + y)?;
    }
    // Beyond the cut both factors are below their cut values and decay faster
    // than exp(-z sqrt(trunc + min)); bound the tail by that exponential.
    let lo = trunc + x.min(y);
    let hi = trunc + x.max(y);
    let tail_bound = if lo > 0.0 {
        airy_ai(lo)?.abs() * airy_ai(hi)?.abs() / (2.0 * lo.sqrt())
    } else {
        f64::INFINITY
    };
    Ok(AiryKernelValue { value: s, tail_bound })
}

/// Closed form `(Ai(x) Ai'(y) - Ai'(x) Ai(y)) / (x - y)` with the diagonal
/// `Ai'(x)^2 - x Ai(x)^2`.
pub fn airy_kernel_closed(x: f64, y: f64) -> Result<f64> {
    let (ax, dx) = (airy_ai(x)?, airy_ai_prime(x)?);
    if (x - y).abs() < 1e-7 * (1.0 + x.abs()) {
        let m = 0.5 * (x + y);
        let (am, dm) = (airy_ai(m)?, airy_ai_prime(m)?);
        return Ok(dm * dm - m * am * am);
    }
    let (ay, dy) = (airy_ai(y)?, airy_ai_prime(y)?);
    Ok((ax * dy - dx * ay) / (x - y))
}

#[cfg(test)]
mod tests {
    use super::*;

    // Reference values from 50-digit arithmetic.
    const AI: &[(f64, f64, f64)] = &[
        (0.0, 0.355_028_053_887_817_24, -0.258_819_403_792_806_8),
        (1.0, 0.135_292_416_312_881_42, -0.159_147_441_296_793_21),
        (2.2, 0.025_610_404_421_773_212, -0.040_497_263_244_453_125),
        (5.0, 1.083_444_281_360_744_2e-4, -2.474_138_908_684_624_8e-4),
        (8.0, 4.692_207_616_099_231_6e-8, -1.341_439_297_906_786_6e-7),
        (8.5, 1.099_700_975_519_550_7e-8, -3.237_725_440_447_602_3e-8),
        (10.0, 1.104_753_255_289_868_6e-10, -3.520_633_676_738_923_6e-10),
        (40.0, 6.365_742_658_552_915e-75, -4.030_017_977_600_678e-74),
        (-3.3, -0.417_180_937_374_550_14, -0.070_963_617_177_835_884),
        (-5.0, 0.350_761_009_024_114_32, 0.327_192_818_554_443_14),
        (-8.0, -0.052_705_050_356_386_203, 0.935_560_938_198_306_55),
        (-8.5, -0.330_290_237_630_208_9, -0.032_313_348_284_639_136),
        (-10.0, 0.040_241_238_486_443_19, 0.996_265_044_132_790_1),
        (-20.0, -0.176_406_127_077_984_7, 0.892_862_856_736_471_2),
    ];

    #[test]
    fn reference_values() {
        for &(x, a, d) in AI {
            let va = airy_ai(x).unwrap();
            let vd = airy_ai_prime(x).unwrap();
            let scale = a.abs().max(d.abs());
            assert!((va - a).abs() < 1e-12 * scale, "Ai({x}) = {va}, want {a}");
            assert!((vd - d).abs() < 1e-12 * scale, "Ai'({x}) = {vd}, want {d}");
        }
    }

    #[test]
    fn out_of_range() {
        assert!(airy_ai(-20.5).is_err());
        assert!(airy_ai(40.5).is_err());
    }

    #[test]
    fn positive_and_decreasing() {
        let mut prev = f64::INFINITY;
        for i in 0..=400 {
            let v = airy_ai(i as f64 * 0.1).unwrap();
            assert!(v > 0.0 && v < prev, "x = {}", i as f64 * 0.1);
            prev = v;
        }
    }

    #[test]
    fn satisfies_airy_equation() {
        let h = 1e-3;
        let f = |x: f64| airy_ai(x).unwrap();
        let d2 = (f(1.0 + h) - 2.0 * f(1.0) + f(1.0 - h)) / (h * h);
        assert!((d2 - f(1.0)).abs() < 1e-6);
    }

    #[test]
    fn kernel_at_origin() {
        let k = airy_kernel(0.0, 0.0, 16.0, 80).unwrap();
        let want = 0.066_987_483_779_663_97;
        assert!((k.value - want).abs() < 1e-12, "{}", k.value);
        assert!(k.tail_bound < 1e-18);
        assert!((airy_kernel_closed(0.0, 0.0).unwrap() - want).abs() < 1e-15);
    }

    #[test]
    fn kernel_symmetry_and_decay() {
        let a = airy_kernel(0.7, -2.3, 20.0, 100).unwrap().value;
        let b = airy_kernel(-2.3, 0.7, 20.0, 100).unwrap().value;
        assert!((a - b).abs() < 1e-14);
        assert!((a - airy_kernel_closed(0.7, -2.3).unwrap()).abs() < 1e-12);
        assert!(airy_kernel(10.0, 10.0, 16.0, 80).unwrap().value < 1e-10);
    }
}
