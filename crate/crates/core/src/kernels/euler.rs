use crate::error::{param_err, Result};

/// `prod_{k >= 1} (1 - tau^k)`, truncated once the log-tail bound
/// `tau^{K+1} / (1 - tau)` drops below `tol`.
pub fn euler_product(tau: f64, tol: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&tau) {
        return param_err(format!("euler_product needs 0 <= tau < 1, got {tau}"));
    }
    if !(tol > 0.0) {
        return param_err("tolerance must be positive");
    }
    let mut prod = 1.0;
    let mut tk = tau;
    while tk / (1.0 - tau) >= tol && tk > 0.0 {
        prod *= 1.0 - tk;
        tk *= tau;
    }
    Ok(prod)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn values() {
        assert_eq!(euler_product(0.0, 1e-16).unwrap(), 1.0);
        // 60-term product evaluated in 50-digit arithmetic.
        assert!((euler_product(0.5, 1e-17).unwrap() - 0.288_788_095_086_602_4).abs() < 1e-15);
        assert!(euler_product(1.0, 1e-10).is_err());
    }

    #[test]
    fn decreasing_in_tau() {
        let v: Vec<f64> = (0..20).map(|i| euler_product(i as f64 * 0.045, 1e-15).unwrap()).collect();
        assert!(v.windows(2).all(|w| w[1] < w[0]));
    }
}
