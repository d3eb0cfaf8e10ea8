use num_complex::Complex;
use num_traits::{One, Zero};

use crate::error::{AsepError, Result};
use crate::precision::{cabs_f64, cr, Real, C};

use super::grid::{IntervalGrid, NystromGrid};

/// Dense discretization `M[j][k] = w_k K(z_j, z_k)` of an integral operator.
#[derive(Clone, Debug)]
pub struct KernelMatrix<T: Real> {
    n: usize,
    entries: Vec<C<T>>,
}

impl<T: Real> KernelMatrix<T> {
    pub fn from_entries(n: usize, entries: Vec<C<T>>) -> Result<Self> {
        if entries.len() != n * n {
            return Err(AsepError::Parameter(format!(
                "expected {} entries, got {}",
                n * n,
                entries.len()
            )));
        }
        Ok(KernelMatrix { n, entries })
    }

    pub fn zeros(n: usize) -> Self {
        KernelMatrix { n, entries: vec![C::<T>::zero(); n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.entries[i * n + i] = C::<T>::one();
        }
        m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, j: usize, k: usize) -> C<T> {
        self.entries[j * self.n + k]
    }

    #[inline]
    pub fn set(&mut self, j: usize, k: usize, v: C<T>) {
        self.entries[j * self.n + k] = v;
    }

    pub fn entries(&self) -> &[C<T>] {
        &self.entries
    }

    pub fn is_finite(&self) -> bool {
        self.entries.iter().all(|z| {
            let w = crate::precision::to_c64(*z);
            w.re.is_finite() && w.im.is_finite()
        })
    }

    pub fn matmul(&self, other: &Self) -> Self {
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for l in 0..n {
                let a = self.entries[i * n + l];
                if a.is_zero() {
                    continue;
                }
                let row = &other.entries[l * n..(l + 1) * n];
                let dst = &mut out.entries[i * n..(i + 1) * n];
                for (d, &b) in dst.iter_mut().zip(row) {
                    *d = *d + a * b;
                }
            }
        }
        out
    }

    pub fn scale(&self, s: C<T>) -> Self {
        KernelMatrix { n: self.n, entries: self.entries.iter().map(|&z| z * s).collect() }
    }

    pub fn add(&self, other: &Self) -> Self {
        let entries = self.entries.iter().zip(&other.entries).map(|(&a, &b)| a + b).collect();
        KernelMatrix { n: self.n, entries }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let entries = self.entries.iter().zip(&other.entries).map(|(&a, &b)| a - b).collect();
        KernelMatrix { n: self.n, entries }
    }

    /// `I - lambda M`.
    pub fn identity_minus(&self, lambda: C<T>) -> Self {
        let n = self.n;
        let mut a = self.scale(-lambda);
        for i in 0..n {
            a.entries[i * n + i] = a.entries[i * n + i] + C::<T>::one();
        }
        a
    }

    pub fn trace(&self) -> C<T> {
        (0..self.n).fold(C::<T>::zero(), |s, i| s + self.entries[i * self.n + i])
    }

    /// Solve `A X = B` by pivoted LU; `self` is `A`.
    pub fn solve(&self, b: &Self) -> Result<Self> {
        let n = self.n;
        let mut a = self.entries.clone();
        let mut x = b.entries.clone();
        for k in 0..n {
            let p = pivot_row(&a, n, k);
            if cabs_f64(a[p * n + k]) == 0.0 {
                return Err(AsepError::Numerical("singular matrix in solve".into()));
            }
            if p != k {
                swap_rows(&mut a, n, p, k);
                swap_rows(&mut x, n, p, k);
            }
            let inv = C::<T>::one() / a[k * n + k];
            for i in k + 1..n {
                let f = a[i * n + k] * inv;
                if f.is_zero() {
                    continue;
                }
                for j in k..n {
                    a[i * n + j] = a[i * n + j] - f * a[k * n + j];
                }
                for j in 0..n {
                    x[i * n + j] = x[i * n + j] - f * x[k * n + j];
                }
            }
        }
        for k in (0..n).rev() {
            let inv = C::<T>::one() / a[k * n + k];
            for j in 0..n {
                let mut s = x[k * n + j];
                for l in k + 1..n {
                    s = s - a[k * n + l] * x[l * n + j];
                }
                x[k * n + j] = s * inv;
            }
        }
        Ok(KernelMatrix { n, entries: x })
    }
}

fn pivot_row<T: Real>(a: &[C<T>], n: usize, k: usize) -> usize {
    let mut best = k;
    let mut best_mag = -1.0;
    for i in k..n {
        let z = a[i * n + k];
        let mag = z.re.to_f64().abs() + z.im.to_f64().abs();
        if mag > best_mag {
            best_mag = mag;
            best = i;
        }
    }
    best
}

fn swap_rows<T: Copy>(a: &mut [T], n: usize, i: usize, j: usize) {
    for c in 0..n {
        a.swap(i * n + c, j * n + c);
    }
}

/// Nystrom matrix of a complex kernel on a contour grid.
pub fn discretize<T: Real>(
    kernel: impl Fn(C<T>, C<T>) -> C<T>,
    grid: &NystromGrid<T>,
) -> Result<KernelMatrix<T>> {
    let n = grid.len();
    let mut entries = Vec::with_capacity(n * n);
    for j in 0..n {
        for k in 0..n {
            let v = kernel(grid.nodes[j], grid.nodes[k]) * grid.weights[k];
            let w = crate::precision::to_c64(v);
            if !(w.re.is_finite() && w.im.is_finite()) {
                return Err(AsepError::Numerical(format!(
                    "kernel not finite at node pair ({j}, {k}): z = {:?}, z' = {:?}",
                    crate::precision::to_c64(grid.nodes[j]),
                    crate::precision::to_c64(grid.nodes[k])
                )));
            }
            entries.push(v);
        }
    }
    Ok(KernelMatrix { n, entries })
}

/// Symmetrized Nystrom matrix `sqrt(w_j) K(x_j, x_k) sqrt(w_k)` of a real kernel
/// on an interval; similar to the plain discretization, so determinants agree.
pub fn discretize_symmetric(
    kernel: impl Fn(f64, f64) -> f64,
    grid: &IntervalGrid,
) -> Result<KernelMatrix<f64>> {
    let n = grid.nodes.len();
    let sw: Vec<f64> = grid.weights.iter().map(|w| w.sqrt()).collect();
    let mut entries = Vec::with_capacity(n * n);
    for j in 0..n {
        for k in 0..n {
            let v = sw[j] * kernel(grid.nodes[j], grid.nodes[k]) * sw[k];
            if !v.is_finite() {
                return Err(AsepError::Numerical(format!(
                    "kernel not finite at ({}, {})",
                    grid.nodes[j], grid.nodes[k]
                )));
            }
            entries.push(Complex::new(v, 0.0));
        }
    }
    Ok(KernelMatrix { n, entries })
}

/// Determinant of a square matrix by LU with partial pivoting.
pub fn det_lu<T: Real>(m: &KernelMatrix<T>) -> Result<C<T>> {
    let n = m.n;
    let mut a = m.entries.clone();
    let mut det = C::<T>::one();
    for k in 0..n {
        let p = pivot_row(&a, n, k);
        let piv = a[p * n + k];
        if cabs_f64(piv) < f64::MIN_POSITIVE {
            return Err(AsepError::Numerical(format!("pivot underflow at column {k}")));
        }
        if p != k {
            swap_rows(&mut a, n, p, k);
            det = -det;
        }
        det = det * piv;
        let inv = C::<T>::one() / piv;
        for i in k + 1..n {
            let f = a[i * n + k] * inv;
            if f.is_zero() {
                continue;
            }
            let (top, bottom) = a.split_at_mut(i * n);
            let src = &top[k * n + k + 1..k * n + n];
            let dst = &mut bottom[k + 1..n];
            for (d, &s) in dst.iter_mut().zip(src) {
                *d = *d - f * s;
            }
        }
    }
    Ok(det)
}

/// `det(I - lambda M)` by pivoted LU.
pub fn fredholm_det<T: Real>(m: &KernelMatrix<T>, lambda: C<T>) -> Result<C<T>> {
    if !m.is_finite() {
        return Err(AsepError::Numerical("matrix has non-finite entries".into()));
    }
    if lambda.is_zero() {
        return Ok(C::<T>::one());
    }
    det_lu(&m.identity_minus(lambda))
}

/// `tr(M^k)` by repeated multiplication.
pub fn trace_power<T: Real>(m: &KernelMatrix<T>, k: usize) -> Result<C<T>> {
    if k == 0 {
        return Err(AsepError::Parameter("trace power needs k >= 1".into()));
    }
    let mut p = m.clone();
    for _ in 1..k {
        p = p.matmul(m);
    }
    Ok(p.trace())
}

/// Upper Hessenberg form `H = S^{-1} M S`, so that `det(I - lambda M)` can be
/// evaluated in `O(n^2)` per `lambda` once the `O(n^3)` reduction is paid.
#[derive(Clone, Debug)]
pub struct HessenbergPencil<T: Real> {
    h: KernelMatrix<T>,
}

impl<T: Real> HessenbergPencil<T> {
    /// Reduce by stabilized elementary similarity transformations.
    pub fn new(m: &KernelMatrix<T>) -> Result<Self> {
        if !m.is_finite() {
            return Err(AsepError::Numerical("matrix has non-finite entries".into()));
        }
        let n = m.n;
        let mut a = m.entries.clone();
        for k in 1..n.saturating_sub(1) {
            // Pivot: largest entry in column k-1 at or below row k.
            let mut p = k;
            let mut best = -1.0;
            for i in k..n {
                let mag = cabs_f64(a[i * n + k - 1]);
                if mag > best {
                    best = mag;
                    p = i;
                }
            }
            if p != k {
                swap_rows(&mut a, n, p, k);
                for r in 0..n {
                    a.swap(r * n + p, r * n + k);
                }
            }
            let piv = a[k * n + k - 1];
            if piv.is_zero() {
                continue;
            }
            let inv = C::<T>::one() / piv;
            for i in k + 1..n {
                let f = a[i * n + k - 1] * inv;
                if f.is_zero() {
                    continue;
                }
                // Row i -= f row k, then column k += f column i.
                a[i * n + k - 1] = C::<T>::zero();
                let (top, bottom) = a.split_at_mut(i * n);
                let src = &top[k * n + k..k * n + n];
                let dst = &mut bottom[k..n];
                for (d, &s) in dst.iter_mut().zip(src) {
                    *d = *d - f * s;
                }
                for r in 0..n {
                    let v = a[r * n + i];
                    a[r * n + k] = a[r * n + k] + f * v;
                }
            }
        }
        Ok(HessenbergPencil { h: KernelMatrix { n, entries: a } })
    }

    pub fn matrix(&self) -> &KernelMatrix<T> {
        &self.h
    }

    /// `det(I - lambda H)` by Gaussian elimination with adjacent-row pivoting.
    pub fn det(&self, lambda: C<T>) -> C<T> {
        let n = self.h.n;
        let one = C::<T>::one();
        if n == 0 {
            return one;
        }
        let h = &self.h.entries;
        let entry = |i: usize, j: usize| -> C<T> {
            let v = -(lambda * h[i * n + j]);
            if i == j {
                v + one
            } else {
                v
            }
        };
        // `cur` is the partially reduced row k; only row k+1 also reaches column k.
        let mut cur: Vec<C<T>> = (0..n).map(|j| entry(0, j)).collect();
        let mut nxt: Vec<C<T>> = vec![C::<T>::zero(); n];
        let mut det = one;
        for k in 0..n - 1 {
            for j in k..n {
                nxt[j] = entry(k + 1, j);
            }
            if cabs_f64(nxt[k]) > cabs_f64(cur[k]) {
                std::mem::swap(&mut cur, &mut nxt);
                det = -det;
            }
            let piv = cur[k];
            if piv.is_zero() {
                return C::<T>::zero();
            }
            det = det * piv;
            let f = nxt[k] / piv;
            for j in k + 1..n {
                nxt[j] = nxt[j] - f * cur[j];
            }
            std::mem::swap(&mut cur, &mut nxt);
        }
        det * cur[n - 1]
    }
}

/// Sum `w_j g(lambda_j)` with a fixed summation order for reproducibility.
pub fn ordered_sum<T: Real>(terms: impl IntoIterator<Item = C<T>>) -> C<T> {
    terms.into_iter().fold(cr(T::zero()), |s, z| s + z)
}
