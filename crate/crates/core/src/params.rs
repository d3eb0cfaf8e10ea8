//! Model parameters and the asymptotic scaling constants.

use serde::{Deserialize, Serialize};

use crate::error::{param_err, Result};

/// Hop probabilities of the exclusion process and the derived constants.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AsepParams {
    /// Probability that a jump goes right.
    pub p: f64,
    /// Probability that a jump goes left, stored as `1 - p` exactly once.
    pub q: f64,
    /// Drift `q - p`.
    pub gamma: f64,
    /// Ratio `p / q`; `None` only when `q == 0`.
    pub tau: Option<f64>,
}

impl AsepParams {
    pub fn new(p: f64) -> Result<Self> {
        make_params(p)
    }

    /// `tau`, or an error for evaluators that need `0 <= tau < 1`.
    pub fn tau_lt_one(&self) -> Result<f64> {
        match self.tau {
            Some(t) if t < 1.0 => Ok(t),
            _ => param_err(format!(
                "p = {} gives tau >= 1; this evaluator needs p < q",
                self.p
            )),
        }
    }

    /// `tau` for evaluators that need strictly `0 < tau < 1`.
    pub fn tau_open(&self) -> Result<f64> {
        let t = self.tau_lt_one()?;
        if t == 0.0 {
            return param_err("this evaluator needs p > 0");
        }
        Ok(t)
    }

    /// Time argument of the formulas for a physical time `t_phys`.
    pub fn formula_time(&self, t_phys: f64) -> f64 {
        self.gamma * t_phys
    }

    /// Physical time corresponding to formula time `t`.
    pub fn physical_time(&self, t: f64) -> Result<f64> {
        if self.gamma <= 0.0 {
            return param_err("no drift: formula time is undefined for p >= 1/2");
        }
        Ok(t / self.gamma)
    }
}

pub fn make_params(p: f64) -> Result<AsepParams> {
    if !(0.0..1.0).contains(&p) {
        return param_err(format!("p must lie in [0, 1), got {p}"));
    }
    let q = 1.0 - p;
    let tau = if p == 0.0 { Some(0.0) } else { Some(p / q) };
    Ok(AsepParams { p, q, gamma: q - p, tau })
}

/// Constants of the cube-root fluctuation regime for `m = sigma * t`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingConstants {
    pub sigma: f64,
    /// Velocity: the tagged particle sits near `c1 * t`.
    pub c1: f64,
    /// Fluctuation scale in units of `t^{1/3}`.
    pub c2: f64,
    /// Coefficient of the cubic term at the double saddle.
    pub c3: f64,
    /// Location of the double saddle point (negative).
    pub xi_saddle: f64,
}

pub fn scaling_constants(sigma: f64) -> Result<ScalingConstants> {
    if !(sigma > 0.0 && sigma < 1.0) {
        return param_err(format!("sigma must lie in (0, 1), got {sigma}"));
    }
    let rs = sigma.sqrt();
    let one_minus = 1.0 - rs;
    Ok(ScalingConstants {
        sigma,
        c1: -1.0 + 2.0 * rs,
        c2: sigma.powf(-1.0 / 6.0) * one_minus.powf(2.0 / 3.0),
        c3: sigma.powf(-1.0 / 6.0) * one_minus.powf(5.0 / 3.0),
        xi_saddle: -rs / one_minus,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tasep_boundary() {
        let a = make_params(0.0).unwrap();
        assert_eq!((a.q, a.gamma, a.tau), (1.0, 1.0, Some(0.0)));
    }

    #[test]
    fn generic_point() {
        let a = make_params(0.3).unwrap();
        assert_eq!(a.q, 0.7);
        assert!((a.gamma - 0.4).abs() < 1e-15);
        assert!((a.tau.unwrap() - 3.0 / 7.0).abs() < 1e-15);
    }

    #[test]
    fn symmetric_case_is_accepted_but_flagged() {
        let a = make_params(0.5).unwrap();
        assert_eq!(a.gamma, 0.0);
        assert_eq!(a.tau, Some(1.0));
        assert!(a.tau_lt_one().is_err());
    }

    #[test]
    fn rejects_out_of_range() {
        assert!(make_params(1.0).is_err());
        assert!(make_params(-0.1).is_err());
        assert!(make_params(f64::NAN).is_err());
    }

    #[test]
    fn quarter_density_constants() {
        let s = scaling_constants(0.25).unwrap();
        assert_eq!(s.c1, 0.0);
        assert!((s.c2 - 2f64.powf(-1.0 / 3.0)).abs() < 1e-15);
        assert!((s.xi_saddle + 1.0).abs() < 1e-15);
    }

    #[test]
    fn sigma_009() {
        let s = scaling_constants(0.09).unwrap();
        assert!((s.c1 + 0.4).abs() < 1e-15);
        // Reference values from a 50-digit evaluation of the closed forms.
        assert!((s.c2 - 1.177673606017982).abs() < 1e-14);
        assert!((s.c3 - 0.8243715242125874).abs() < 1e-14);
    }

    #[test]
    fn near_one_limits() {
        let s = scaling_constants(1.0 - 1e-9).unwrap();
        assert!((s.c1 - 1.0).abs() < 1e-8);
        assert!(s.c2 < 1e-5 && s.c3 < 1e-13);
    }

    #[test]
    fn rejects_bad_sigma() {
        assert!(scaling_constants(0.0).is_err());
        assert!(scaling_constants(1.0).is_err());
    }
}
