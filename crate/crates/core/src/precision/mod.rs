//! Scalar abstraction used by the determinant code so the same routines run in
//! plain `f64` or in 106/159/212-bit expansions.

mod multi;

use std::fmt::Debug;
use std::ops::{AddAssign, DivAssign, MulAssign, Neg, SubAssign};

use num_complex::Complex;
use num_traits::Num;
use serde::{Deserialize, Serialize};

use crate::error::{AsepError, Result};

pub use multi::MultiFloat;

pub type DoubleDouble = MultiFloat<2>;
pub type TripleDouble = MultiFloat<3>;
pub type QuadDouble = MultiFloat<4>;

pub trait Real:
    Copy
    + Send
    + Sync
    + Debug
    + PartialOrd
    + Num
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
    + 'static
{
    /// Significand bits carried by the type.
    const BITS: u32;

    fn from_f64(x: f64) -> Self;
    fn to_f64(self) -> f64;
    fn abs(self) -> Self;
    fn sqrt(self) -> Self;
    fn exp(self) -> Self;
    fn sin_cos(self) -> (Self, Self);
    fn pi() -> Self;
    fn mul_f64(self, b: f64) -> Self;

    /// Unit roundoff of the type.
    fn epsilon() -> f64 {
        2f64.powi(-(Self::BITS as i32))
    }

    fn from_i64(n: i64) -> Self {
        Self::from_f64(n as f64)
    }
}

impl Real for f64 {
    const BITS: u32 = 53;
    fn from_f64(x: f64) -> Self {
        x
    }
    fn to_f64(self) -> f64 {
        self
    }
    fn abs(self) -> Self {
        f64::abs(self)
    }
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    fn exp(self) -> Self {
        f64::exp(self)
    }
    fn sin_cos(self) -> (Self, Self) {
        f64::sin_cos(self)
    }
    fn pi() -> Self {
        std::f64::consts::PI
    }
    fn mul_f64(self, b: f64) -> Self {
        self * b
    }
}

impl<const N: usize> Real for MultiFloat<N> {
    const BITS: u32 = 53 * N as u32;
    fn from_f64(x: f64) -> Self {
        MultiFloat::from_f64(x)
    }
    fn to_f64(self) -> f64 {
        MultiFloat::to_f64(&self)
    }
    fn abs(self) -> Self {
        MultiFloat::abs(self)
    }
    fn sqrt(self) -> Self {
        MultiFloat::sqrt(self)
    }
    fn exp(self) -> Self {
        MultiFloat::exp(self)
    }
    fn sin_cos(self) -> (Self, Self) {
        MultiFloat::sin_cos(self)
    }
    fn pi() -> Self {
        MultiFloat::pi()
    }
    fn mul_f64(self, b: f64) -> Self {
        MultiFloat::mul_f64(self, b)
    }
}

/// Working precision of a computation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
pub enum Precision {
    #[default]
    P53,
    P106,
    P159,
    P212,
}

impl Precision {
    pub fn bits(self) -> u32 {
        match self {
            Precision::P53 => 53,
            Precision::P106 => 106,
            Precision::P159 => 159,
            Precision::P212 => 212,
        }
    }

    pub fn is_extended(self) -> bool {
        self != Precision::P53
    }
}

/// Select a working precision; only the four ladder rungs are supported.
pub fn high_precision_mode(bits: u32) -> Result<Precision> {
    match bits {
        53 => Ok(Precision::P53),
        106 => Ok(Precision::P106),
        159 => Ok(Precision::P159),
        212 => Ok(Precision::P212),
        other => Err(AsepError::Parameter(format!(
            "unsupported precision {other} bits (expected 53, 106, 159 or 212)"
        ))),
    }
}

/// Run a precision-generic computation at the requested precision.
#[macro_export]
macro_rules! with_precision {
    ($prec:expr, $t:ident => $body:expr) => {
        match $prec {
            $crate::precision::Precision::P53 => {
                type $t = f64;
                $body
            }
            $crate::precision::Precision::P106 => {
                type $t = $crate::precision::DoubleDouble;
                $body
            }
            $crate::precision::Precision::P159 => {
                type $t = $crate::precision::TripleDouble;
                $body
            }
            $crate::precision::Precision::P212 => {
                type $t = $crate::precision::QuadDouble;
                $body
            }
        }
    };
}

pub type C<T> = Complex<T>;

pub fn c<T: Real>(re: f64, im: f64) -> C<T> {
    Complex::new(T::from_f64(re), T::from_f64(im))
}

pub fn cr<T: Real>(re: T) -> C<T> {
    Complex::new(re, T::zero())
}

pub fn to_c64<T: Real>(z: C<T>) -> Complex<f64> {
    Complex::new(z.re.to_f64(), z.im.to_f64())
}

pub fn from_c64<T: Real>(z: Complex<f64>) -> C<T> {
    Complex::new(T::from_f64(z.re), T::from_f64(z.im))
}

pub fn cabs2<T: Real>(z: C<T>) -> T {
    z.re * z.re + z.im * z.im
}

/// Modulus as `f64`; only used for error estimates and pivoting decisions.
pub fn cabs_f64<T: Real>(z: C<T>) -> f64 {
    z.re.to_f64().hypot(z.im.to_f64())
}

pub fn cexp<T: Real>(z: C<T>) -> C<T> {
    let r = z.re.exp();
    let (s, co) = z.im.sin_cos();
    Complex::new(r * co, r * s)
}

pub fn cscale<T: Real>(z: C<T>, s: f64) -> C<T> {
    Complex::new(z.re.mul_f64(s), z.im.mul_f64(s))
}

pub fn cinv<T: Real>(z: C<T>) -> C<T> {
    let d = cabs2(z);
    Complex::new(z.re / d, -z.im / d)
}

/// Integer power by repeated squaring; negative exponents invert first.
pub fn cpowi<T: Real>(z: C<T>, n: i64) -> C<T> {
    let mut base = if n < 0 { cinv(z) } else { z };
    let mut e = n.unsigned_abs();
    let mut acc = cr(T::one());
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base;
        }
        base = base * base;
        e >>= 1;
    }
    acc
}

/// `e^{i theta}` with `theta = 2 pi k / n` evaluated at full precision.
pub fn root_of_unity<T: Real>(k: usize, n: usize) -> C<T> {
    let theta = T::pi().mul_f64(2.0) * T::from_f64(k as f64) / T::from_f64(n as f64);
    let (s, co) = theta.sin_cos();
    Complex::new(co, s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ladder_rejects_other_widths() {
        assert!(high_precision_mode(64).is_err());
        assert_eq!(high_precision_mode(106).unwrap(), Precision::P106);
    }

    #[test]
    fn complex_exp_matches_f64() {
        let z: C<DoubleDouble> = c(0.3, -1.7);
        let w = to_c64(cexp(z));
        let r = Complex::new(0.3f64, -1.7).exp();
        assert!((w - r).norm() < 1e-15);
    }

    #[test]
    fn powi_negative() {
        let z: C<f64> = c(1.5, 0.5);
        let a = cpowi(z, -3);
        let b = Complex::new(1.5f64, 0.5).powi(-3);
        assert!((a - b).norm() < 1e-15);
    }

    #[test]
    fn roots_of_unity_close_up() {
        let n = 12;
        let mut acc: C<QuadDouble> = cr(QuadDouble::from_f64(0.0));
        for k in 0..n {
            acc = acc + root_of_unity::<QuadDouble>(k, n);
        }
        assert!(cabs_f64(acc) < 1e-60);
    }
}
