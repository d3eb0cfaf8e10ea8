//! Kernels of the determinant formulas and the scalar special functions they
//! need.

mod airy;
mod asep;
mod euler;
mod mehler;

pub use airy::{airy_ai, airy_ai_prime, airy_kernel, airy_kernel_closed, AiryKernelValue};
pub use asep::{
    epsilon, f_mu, j_radii, k1_minus_k2_matrix, kernel_j, kernel_k, kernel_k0, kernel_k1,
    kernel_k1_minus_k2, kernel_k2, mu_j_matrix, resolvent_r, JForm, Phi, SeriesValue,
};
pub use euler::euler_product;
pub use mehler::mehler_kernel;

use serde::{Deserialize, Serialize};

use crate::error::{param_err, Result};
use crate::params::AsepParams;

/// Which particle, where, and when. `t` is formula time (physical time times
/// the drift).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelContext {
    pub params: AsepParams,
    pub m: u32,
    pub x: i64,
    pub t: f64,
}

impl KernelContext {
    pub fn new(params: AsepParams, m: u32, x: i64, t: f64) -> Result<Self> {
        if m == 0 {
            return param_err("particle index m must be at least 1");
        }
        if !(t > 0.0 && t.is_finite()) {
            return param_err(format!("time must be positive and finite, got {t}"));
        }
        Ok(KernelContext { params, m, x, t })
    }
}
