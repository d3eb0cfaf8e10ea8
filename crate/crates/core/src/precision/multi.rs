//! Fixed-length floating-point expansions: a value is the unevaluated sum of
//! `N` non-overlapping `f64` limbs, giving roughly `53 * N` bits of precision.
//!
//! `N = 2` uses the classical double-double algorithms; larger `N` go through a
//! generic merge-and-renormalize path which is slower but only used for
//! precision-ladder cross-checks.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Rem, Sub, SubAssign};

use num_traits::{Num, One, Zero};

#[derive(Clone, Copy, PartialEq)]
pub struct MultiFloat<const N: usize> {
    limbs: [f64; N],
}

/// Scratch capacity for intermediate term lists (enough for `N <= 4`).
const SCRATCH: usize = 40;

#[inline(always)]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let e = (a - (s - bb)) + (b - bb);
    (s, e)
}

#[inline(always)]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline(always)]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

/// Collapse a list of terms into `N` non-overlapping limbs.
fn renormalize<const N: usize>(terms: &mut [f64]) -> [f64; N] {
    let m = terms.len();
    let mut out = [0.0; N];
    if m == 0 {
        return out;
    }
    // Bottom-up sweep: the running sum migrates to the front, errors stay behind.
    let mut s = terms[m - 1];
    for i in (0..m - 1).rev() {
        let (hi, lo) = two_sum(terms[i], s);
        s = hi;
        terms[i + 1] = lo;
    }
    terms[0] = s;
    // A second sweep tightens the ordering when the input was far from sorted.
    let mut s = terms[m - 1];
    for i in (0..m - 1).rev() {
        let (hi, lo) = two_sum(terms[i], s);
        s = hi;
        terms[i + 1] = lo;
    }
    terms[0] = s;
    // Top-down extraction of non-overlapping components.
    let mut k = 0;
    let mut s = terms[0];
    for &t in terms.iter().skip(1) {
        let (hi, lo) = two_sum(s, t);
        if lo != 0.0 {
            out[k] = hi;
            k += 1;
            if k == N {
                return out;
            }
            s = lo;
        } else {
            s = hi;
        }
    }
    out[k] = s;
    out
}

fn sort_by_magnitude(terms: &mut [f64]) {
    // Insertion sort: the lists are short and usually nearly sorted.
    for i in 1..terms.len() {
        let v = terms[i];
        let mut j = i;
        while j > 0 && terms[j - 1].abs() < v.abs() {
            terms[j] = terms[j - 1];
            j -= 1;
        }
        terms[j] = v;
    }
}

impl<const N: usize> MultiFloat<N> {
    pub const fn from_limbs(limbs: [f64; N]) -> Self {
        MultiFloat { limbs }
    }

    /// Build from up to four limbs of a constant, dropping the excess.
    const fn from_const(c: [f64; 4]) -> Self {
        let mut limbs = [0.0; N];
        let mut i = 0;
        while i < N && i < 4 {
            limbs[i] = c[i];
            i += 1;
        }
        MultiFloat { limbs }
    }

    pub fn limbs(&self) -> &[f64; N] {
        &self.limbs
    }

    pub fn from_f64(x: f64) -> Self {
        let mut limbs = [0.0; N];
        limbs[0] = x;
        MultiFloat { limbs }
    }

    pub fn hi(&self) -> f64 {
        self.limbs[0]
    }

    pub fn to_f64(&self) -> f64 {
        // Summing from the tail keeps the rounding of the leading limb correct.
        let mut s = 0.0;
        for &l in self.limbs.iter().rev() {
            s += l;
        }
        s
    }

    pub fn is_finite(&self) -> bool {
        self.limbs[0].is_finite()
    }

    fn add_impl(self, b: Self) -> Self {
        if N == 2 {
            let a = &self.limbs;
            let b = &b.limbs;
            let (s1, s2) = two_sum(a[0], b[0]);
            let (t1, t2) = two_sum(a[1], b[1]);
            let (s1, s2) = quick_two_sum(s1, s2 + t1);
            let (s1, s2) = quick_two_sum(s1, s2 + t2);
            let mut limbs = [0.0; N];
            limbs[0] = s1;
            limbs[1] = s2;
            return MultiFloat { limbs };
        }
        if N == 1 {
            let mut limbs = [0.0; N];
            limbs[0] = self.limbs[0] + b.limbs[0];
            return MultiFloat { limbs };
        }
        // Merge the two limb lists by decreasing magnitude.
        let mut buf = [0.0; SCRATCH];
        let (mut i, mut j, mut k) = (0, 0, 0);
        while i < N || j < N {
            let take_a = j >= N || (i < N && self.limbs[i].abs() >= b.limbs[j].abs());
            if take_a {
                buf[k] = self.limbs[i];
                i += 1;
            } else {
                buf[k] = b.limbs[j];
                j += 1;
            }
            k += 1;
        }
        MultiFloat { limbs: renormalize::<N>(&mut buf[..k]) }
    }

    fn mul_impl(self, b: Self) -> Self {
        if N == 2 {
            let a = &self.limbs;
            let b = &b.limbs;
            let (p1, p2) = two_prod(a[0], b[0]);
            let p2 = p2 + (a[0] * b[1] + a[1] * b[0]);
            let (p1, p2) = quick_two_sum(p1, p2);
            let mut limbs = [0.0; N];
            limbs[0] = p1;
            limbs[1] = p2;
            return MultiFloat { limbs };
        }
        if N == 1 {
            let mut limbs = [0.0; N];
            limbs[0] = self.limbs[0] * b.limbs[0];
            return MultiFloat { limbs };
        }
        let mut buf = [0.0; SCRATCH];
        let mut k = 0;
        for order in 0..=N {
            for i in 0..=order {
                let j = order - i;
                if i >= N || j >= N {
                    continue;
                }
                if order < N {
                    let (p, e) = two_prod(self.limbs[i], b.limbs[j]);
                    buf[k] = p;
                    buf[k + 1] = e;
                    k += 2;
                } else {
                    buf[k] = self.limbs[i] * b.limbs[j];
                    k += 1;
                }
            }
        }
        sort_by_magnitude(&mut buf[..k]);
        MultiFloat { limbs: renormalize::<N>(&mut buf[..k]) }
    }

    /// Multiply by a single `f64`, cheaper than a full product.
    pub fn mul_f64(self, b: f64) -> Self {
        if N == 2 {
            let (p1, p2) = two_prod(self.limbs[0], b);
            let p2 = self.limbs[1].mul_add(b, p2);
            let (p1, p2) = quick_two_sum(p1, p2);
            let mut limbs = [0.0; N];
            limbs[0] = p1;
            limbs[1] = p2;
            return MultiFloat { limbs };
        }
        self.mul_impl(Self::from_f64(b))
    }

    fn div_impl(self, b: Self) -> Self {
        if N == 1 {
            let mut limbs = [0.0; N];
            limbs[0] = self.limbs[0] / b.limbs[0];
            return MultiFloat { limbs };
        }
        // Long division: each step peels one f64 quotient digit.
        let mut q = [0.0; SCRATCH];
        let mut r = self;
        let steps = N + 1;
        for qi in q.iter_mut().take(steps) {
            let d = r.limbs[0] / b.limbs[0];
            *qi = d;
            r = r.add_impl(-b.mul_f64(d));
        }
        MultiFloat { limbs: renormalize::<N>(&mut q[..steps]) }
    }

    /// Multiply by 2^k exactly (barring overflow or underflow).
    pub fn ldexp(self, k: i32) -> Self {
        let mut out = self;
        let mut k = k;
        while k != 0 {
            let step = k.clamp(-1000, 1000);
            let f = 2f64.powi(step);
            for l in out.limbs.iter_mut() {
                *l *= f;
            }
            k -= step;
        }
        out
    }

    pub fn abs(self) -> Self {
        if self.limbs[0] < 0.0 {
            -self
        } else {
            self
        }
    }

    pub fn sqrt(self) -> Self {
        if self.limbs[0] <= 0.0 {
            return if self.limbs[0] == 0.0 { Self::zero() } else { Self::from_f64(f64::NAN) };
        }
        let mut x = Self::from_f64(self.limbs[0].sqrt());
        // Each Newton step doubles the number of correct bits.
        let mut bits = 52;
        while bits < 53 * N + 8 {
            x = (x + self / x).mul_f64(0.5);
            bits *= 2;
        }
        x
    }

    pub fn pi() -> Self {
        Self::from_const(PI_LIMBS)
    }

    fn ln2() -> Self {
        Self::from_const(LN2_LIMBS)
    }

    pub fn exp(self) -> Self {
        let x0 = self.limbs[0];
        if x0 > 709.0 {
            return Self::from_f64(f64::INFINITY);
        }
        if x0 < -745.0 {
            return Self::zero();
        }
        if x0 == 0.0 {
            return Self::one();
        }
        // x = k ln2 + r, then exp(r) = exp(r / 2^s)^(2^s).
        let k = (x0 / std::f64::consts::LN_2).round();
        let r = self - Self::ln2().mul_f64(k);
        let s = 5;
        let r = r.ldexp(-s);
        let tol = 2f64.powi(-(53 * N as i32) - 8);
        let mut term = Self::one();
        let mut sum = Self::one();
        let mut n = 1.0;
        loop {
            term = term * r / Self::from_f64(n);
            sum += term;
            if term.limbs[0].abs() < tol {
                break;
            }
            n += 1.0;
        }
        for _ in 0..s {
            sum = sum * sum;
        }
        sum.ldexp(k as i32)
    }

    /// Simultaneous sine and cosine via reduction to [-pi/4, pi/4] and Taylor series.
    pub fn sin_cos(self) -> (Self, Self) {
        let half_pi = Self::from_const(HALF_PI_LIMBS);
        let j = (self.limbs[0] / std::f64::consts::FRAC_PI_2).round();
        let r = self - half_pi.mul_f64(j);
        let tol = 2f64.powi(-(53 * N as i32) - 8);
        let r2 = r * r;
        // sin
        let mut term = r;
        let mut s = r;
        let mut n = 1.0;
        while term.limbs[0].abs() > tol {
            term = -(term * r2) / Self::from_f64((n + 1.0) * (n + 2.0));
            s += term;
            n += 2.0;
        }
        let mut term = Self::one();
        let mut c = Self::one();
        let mut n = 0.0;
        while term.limbs[0].abs() > tol {
            term = -(term * r2) / Self::from_f64((n + 1.0) * (n + 2.0));
            c += term;
            n += 2.0;
        }
        match (j as i64).rem_euclid(4) {
            0 => (s, c),
            1 => (c, -s),
            2 => (-s, -c),
            _ => (-c, s),
        }
    }
}

const PI_LIMBS: [f64; 4] = [
    3.141592653589793,
    1.2246467991473532e-16,
    -2.9947698097183397e-33,
    1.1124542208633653e-49,
];
const LN2_LIMBS: [f64; 4] = [
    0.6931471805599453,
    2.3190468138462996e-17,
    5.707708438416212e-34,
    -3.5824322106018114e-50,
];
const HALF_PI_LIMBS: [f64; 4] = [
    1.5707963267948966,
    6.123233995736766e-17,
    -1.4973849048591698e-33,
    5.562271104316826e-50,
];

impl<const N: usize> fmt::Debug for MultiFloat<N> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MultiFloat{:?}", self.limbs)
    }
}

impl<const N: usize> fmt::Display for MultiFloat<N> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:e}", self.to_f64())
    }
}

impl<const N: usize> Default for MultiFloat<N> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<const N: usize> PartialOrd for MultiFloat<N> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        let d = *self - *other;
        d.limbs[0].partial_cmp(&0.0)
    }
}

impl<const N: usize> Neg for MultiFloat<N> {
    type Output = Self;
    fn neg(self) -> Self {
        let mut limbs = self.limbs;
        for l in limbs.iter_mut() {
            *l = -*l;
        }
        MultiFloat { limbs }
    }
}

impl<const N: usize> Add for MultiFloat<N> {
    type Output = Self;
    #[inline]
    fn add(self, b: Self) -> Self {
        self.add_impl(b)
    }
}

impl<const N: usize> Sub for MultiFloat<N> {
    type Output = Self;
    #[inline]
    fn sub(self, b: Self) -> Self {
        self.add_impl(-b)
    }
}

impl<const N: usize> Mul for MultiFloat<N> {
    type Output = Self;
    #[inline]
    fn mul(self, b: Self) -> Self {
        self.mul_impl(b)
    }
}

impl<const N: usize> Div for MultiFloat<N> {
    type Output = Self;
    #[inline]
    fn div(self, b: Self) -> Self {
        self.div_impl(b)
    }
}

impl<const N: usize> Rem for MultiFloat<N> {
    type Output = Self;
    fn rem(self, b: Self) -> Self {
        let q = (self / b).to_f64().trunc();
        self - b.mul_f64(q)
    }
}

impl<const N: usize> AddAssign for MultiFloat<N> {
    fn add_assign(&mut self, b: Self) {
        *self = *self + b;
    }
}

impl<const N: usize> SubAssign for MultiFloat<N> {
    fn sub_assign(&mut self, b: Self) {
        *self = *self - b;
    }
}

impl<const N: usize> MulAssign for MultiFloat<N> {
    fn mul_assign(&mut self, b: Self) {
        *self = *self * b;
    }
}

impl<const N: usize> DivAssign for MultiFloat<N> {
    fn div_assign(&mut self, b: Self) {
        *self = *self / b;
    }
}

impl<const N: usize> Zero for MultiFloat<N> {
    fn zero() -> Self {
        MultiFloat { limbs: [0.0; N] }
    }
    fn is_zero(&self) -> bool {
        self.limbs[0] == 0.0
    }
}

impl<const N: usize> One for MultiFloat<N> {
    fn one() -> Self {
        Self::from_f64(1.0)
    }
}

impl<const N: usize> Num for MultiFloat<N> {
    type FromStrRadixErr = std::num::ParseFloatError;
    fn from_str_radix(s: &str, radix: u32) -> Result<Self, Self::FromStrRadixErr> {
        debug_assert_eq!(radix, 10);
        s.parse::<f64>().map(Self::from_f64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type D = MultiFloat<2>;
    type T = MultiFloat<3>;
    type Q = MultiFloat<4>;

    fn err<const N: usize>(a: MultiFloat<N>, b: MultiFloat<N>) -> f64 {
        (a - b).to_f64().abs()
    }

    #[test]
    fn one_third_round_trip() {
        let three = D::from_f64(3.0);
        let x = D::one() / three;
        assert!(err(x * three, D::one()) < 1e-31);
        let three = Q::from_f64(3.0);
        let x = Q::one() / three;
        assert!(err(x * three, Q::one()) < 1e-62);
    }

    #[test]
    fn sqrt_two_squared() {
        let r = T::from_f64(2.0).sqrt();
        assert!(err(r * r, T::from_f64(2.0)) < 1e-46);
    }

    #[test]
    fn exp_of_ln2_is_two() {
        assert!(err(D::ln2().exp(), D::from_f64(2.0)) < 1e-30);
        assert!(err(Q::ln2().exp(), Q::from_f64(2.0)) < 1e-60);
    }

    #[test]
    fn exp_one_matches_e_limbs() {
        // Limbs of e taken from a 120-digit reference.
        let e = Q::from_limbs([
            2.718281828459045,
            1.4456468917292502e-16,
            -2.1277171080381768e-33,
            1.5156301598412191e-49,
        ]);
        assert!(err(Q::one().exp(), e) < 1e-60);
    }

    #[test]
    fn exp_additivity() {
        let a = D::from_f64(3.7);
        let b = D::from_f64(-1.3);
        let lhs = (a + b).exp();
        let rhs = a.exp() * b.exp();
        assert!(err(lhs, rhs) / lhs.to_f64() < 1e-30);
    }

    #[test]
    fn pythagorean_identity() {
        for &x in &[0.1, 1.0, 2.5, -4.0, 6.2] {
            let (s, c) = Q::from_f64(x).sin_cos();
            assert!(err(s * s + c * c, Q::one()) < 1e-60);
            assert!((s.to_f64() - x.sin()).abs() < 1e-15);
        }
        let (s, c) = T::pi().sin_cos();
        assert!(s.to_f64().abs() < 1e-46);
        assert!(err(c, -T::one()) < 1e-46);
    }

    #[test]
    fn ordering_uses_all_limbs() {
        let a = D::from_limbs([1.0, 1e-20]);
        let b = D::from_limbs([1.0, -1e-20]);
        assert!(a > b);
        assert!(b < a);
    }
}
