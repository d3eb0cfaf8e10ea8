use num_complex::Complex;
use num_traits::Zero;

use crate::error::{param_err, Result};
use crate::precision::{c, cr, root_of_unity, Real, C};

use super::legendre::gauss_legendre;

/// Geometric description of an integration path.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Contour {
    /// Counterclockwise for `orientation = +1`, clockwise for `-1`.
    Circle { center: Complex<f64>, radius: f64, orientation: i8 },
    Interval { a: f64, b: f64 },
    /// Two rays meeting at `base`: in along angle `-angle`, out along `+angle`.
    RayPair { base: Complex<f64>, angle: f64, length: f64 },
}

impl Contour {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Contour::Circle { radius, orientation, .. } => {
                if !(radius > 0.0) {
                    return param_err("circle radius must be positive");
                }
                if orientation != 1 && orientation != -1 {
                    return param_err("orientation must be +1 or -1");
                }
            }
            Contour::Interval { a, b } => {
                if !(a < b) {
                    return param_err(format!("interval needs a < b, got ({a}, {b})"));
                }
            }
            Contour::RayPair { length, .. } => {
                if !(length > 0.0) {
                    return param_err("ray length must be positive");
                }
            }
        }
        Ok(())
    }

    /// Discretize with `n` nodes (per ray for a ray pair).
    pub fn grid<T: Real>(&self, n: usize) -> Result<NystromGrid<T>> {
        self.validate()?;
        match *self {
            Contour::Circle { center, radius, orientation } => {
                circle_grid(center, radius, orientation, n)
            }
            Contour::Interval { a, b } => {
                let g = interval_grid(a, b, n)?;
                Ok(NystromGrid {
                    nodes: g.nodes.iter().map(|&x| c(x, 0.0)).collect(),
                    weights: g.weights.iter().map(|&w| c(w, 0.0)).collect(),
                })
            }
            Contour::RayPair { base, angle, length } => ray_pair_grid(base, angle, length, n),
        }
    }
}

/// Quadrature nodes and weights. For closed contours the weights include the
/// `1/(2 pi i)` factor, so `sum w_j f(z_j)` approximates `(1/2 pi i) \oint f dz`.
#[derive(Clone, Debug)]
pub struct NystromGrid<T: Real> {
    pub nodes: Vec<C<T>>,
    pub weights: Vec<C<T>>,
}

impl<T: Real> NystromGrid<T> {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Quadrature of a scalar function.
    pub fn integrate(&self, f: impl Fn(C<T>) -> C<T>) -> C<T> {
        let mut s = C::<T>::zero();
        for (z, w) in self.nodes.iter().zip(&self.weights) {
            s = s + *w * f(*z);
        }
        s
    }
}

/// Trapezoid rule on a circle: node `j` is `center + r e^{2 pi i j / n}` and its
/// weight `orientation (node - center) / n` equals `dz / (2 pi i)`.
pub fn circle_grid<T: Real>(
    center: Complex<f64>,
    radius: f64,
    orientation: i8,
    n: usize,
) -> Result<NystromGrid<T>> {
    if n < 4 {
        return param_err("circle grids need at least 4 nodes");
    }
    if !(radius > 0.0) || (orientation != 1 && orientation != -1) {
        return param_err("bad circle parameters");
    }
    let c0: C<T> = c(center.re, center.im);
    let r = T::from_f64(radius);
    let scale = orientation as f64 / n as f64;
    let mut nodes = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    for j in 0..n {
        let off = root_of_unity::<T>(j, n) * cr(r);
        nodes.push(c0 + off);
        weights.push(Complex::new(off.re.mul_f64(scale), off.im.mul_f64(scale)));
    }
    Ok(NystromGrid { nodes, weights })
}

/// Gauss-Legendre rule on a real interval.
#[derive(Clone, Debug)]
pub struct IntervalGrid {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl IntervalGrid {
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }
}

pub fn interval_grid(a: f64, b: f64, n: usize) -> Result<IntervalGrid> {
    if !(a < b) {
        return param_err(format!("interval needs a < b, got ({a}, {b})"));
    }
    if n < 2 {
        return param_err("interval grids need at least 2 nodes");
    }
    let (x, w) = gauss_legendre(n);
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    Ok(IntervalGrid {
        nodes: x.iter().map(|&t| mid + half * t).collect(),
        weights: w.iter().map(|&v| v * half).collect(),
    })
}

fn ray_pair_grid<T: Real>(
    base: Complex<f64>,
    angle: f64,
    length: f64,
    n: usize,
) -> Result<NystromGrid<T>> {
    let g = interval_grid(0.0, length, n)?;
    let inv_2pi_i = Complex::new(0.0, -1.0 / (2.0 * std::f64::consts::PI));
    let dir_in = Complex::from_polar(1.0, -angle);
    let dir_out = Complex::from_polar(1.0, angle);
    let mut nodes = Vec::with_capacity(2 * n);
    let mut weights = Vec::with_capacity(2 * n);
    // Incoming ray runs from base + L e^{-i angle} to base.
    for (&s, &w) in g.nodes.iter().zip(&g.weights) {
        let z = base + dir_in * s;
        let wz = -dir_in * w * inv_2pi_i;
        nodes.push(c(z.re, z.im));
        weights.push(c(wz.re, wz.im));
    }
    for (&s, &w) in g.nodes.iter().zip(&g.weights) {
        let z = base + dir_out * s;
        let wz = dir_out * w * inv_2pi_i;
        nodes.push(c(z.re, z.im));
        weights.push(c(wz.re, wz.im));
    }
    Ok(NystromGrid { nodes, weights })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::precision::{to_c64, DoubleDouble};

    #[test]
    fn residue_of_inverse() {
        let g: NystromGrid<f64> = circle_grid(Complex::new(0.0, 0.0), 2.0, 1, 16).unwrap();
        let s = g.integrate(|z| Complex::new(1.0, 0.0) / z);
        assert!((s - Complex::new(1.0, 0.0)).norm() < 1e-15);
        let g: NystromGrid<f64> = circle_grid(Complex::new(0.0, 0.0), 2.0, -1, 16).unwrap();
        let s = g.integrate(|z| Complex::new(1.0, 0.0) / z);
        assert!((s + Complex::new(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn off_center_circle_misses_origin() {
        let g: NystromGrid<f64> = circle_grid(Complex::new(5.0, 0.0), 1.0, 1, 32).unwrap();
        let s = g.integrate(|z| Complex::new(1.0, 0.0) / z);
        assert!(s.norm() < 1e-14);
    }

    #[test]
    fn extended_precision_nodes() {
        let g: NystromGrid<DoubleDouble> =
            circle_grid(Complex::new(0.0, 0.0), 1.5, 1, 64).unwrap();
        let s = g.integrate(|z| crate::precision::cinv(z));
        assert!((to_c64(s) - Complex::new(1.0, 0.0)).norm() < 1e-30);
    }

    #[test]
    fn legendre_exactness() {
        let g = interval_grid(0.0, 1.0, 2).unwrap();
        assert!((g.integrate(|_| 1.0) - 1.0).abs() < 1e-15);
        assert!((g.integrate(|x| x * x * x) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn truncated_exponential() {
        let g = interval_grid(0.0, 40.0, 80).unwrap();
        assert!((g.integrate(|x| (-x).exp()) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ray_pair_antiderivative() {
        // For an entire integrand the path integral is the antiderivative
        // difference between the two far ends.
        let (angle, len) = (0.75 * std::f64::consts::PI, 3.0);
        let g: NystromGrid<f64> =
            Contour::RayPair { base: Complex::new(0.0, 0.0), angle, length: len }
                .grid(40)
                .unwrap();
        let s = g.integrate(|z| z.exp());
        let a = Complex::from_polar(len, -angle);
        let b = Complex::from_polar(len, angle);
        let want = (b.exp() - a.exp()) / Complex::new(0.0, 2.0 * std::f64::consts::PI);
        assert!((s - want).norm() < 1e-14);
    }
}
