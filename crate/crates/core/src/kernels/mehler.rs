use crate::params::AsepParams;

/// Symmetrized Mehler kernel
/// `q / sqrt(2 pi) exp(-(p^2 + q^2)(z^2 + z'^2)/4 + p q z z')`.
pub fn mehler_kernel(params: &AsepParams) -> impl Fn(f64, f64) -> f64 {
    let (p, q) = (params.p, params.q);
    let a = (p * p + q * q) / 4.0;
    let b = p * q;
    let c = q / (2.0 * std::f64::consts::PI).sqrt();
    move |z, zp| c * (-a * (z * z + zp * zp) + b * z * zp).exp()
}
