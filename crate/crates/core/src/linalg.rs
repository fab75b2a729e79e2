//! Small dense linear algebra, generic over [`Real`].
//!
//! Matrices here are tiny (tens of columns) and appear in both precisions, so
//! the routines favour robustness over speed: Householder QR, one-sided
//! Jacobi SVD for minimum-norm least squares, and Cholesky for the damped
//! normal equations of the nonlinear solver.

use crate::real::Real;

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Real> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Matrix { rows: r, cols: c, data: rows.concat() }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Self {
        Matrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn mul_vec(&self, x: &[T]) -> Vec<T> {
        assert_eq!(x.len(), self.cols);
        (0..self.rows).map(|i| self.row(i).iter().zip(x).map(|(&a, &b)| a * b).sum()).collect()
    }

    pub fn matmul(&self, other: &Matrix<T>) -> Matrix<T> {
        assert_eq!(self.cols, other.rows);
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn max_abs_diff(&self, other: &Matrix<T>) -> f64 {
        self.data.iter().zip(&other.data).map(|(&a, &b)| (a - b).abs().to_f64()).fold(0.0, f64::max)
    }

    pub fn map<U: Real>(&self, f: impl Fn(T) -> U) -> Matrix<U> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&x| f(x)).collect() }
    }
}

impl<T> std::ops::Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> std::ops::IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

/// Thin Householder QR of a tall matrix (`rows >= cols`). Returns the upper
/// triangular factor with a nonnegative diagonal.
pub fn qr_r<T: Real>(a: &Matrix<T>) -> Matrix<T> {
    let (m, n) = (a.rows, a.cols);
    assert!(m >= n, "qr_r expects a tall matrix");
    let mut w = a.clone();
    for k in 0..n {
        let norm = (k..m).map(|i| w[(i, k)] * w[(i, k)]).sum::<T>().sqrt();
        if norm.to_f64() == 0.0 {
            continue;
        }
        let alpha = if w[(k, k)] > T::zero() { -norm } else { norm };
        let mut v: Vec<T> = (k..m).map(|i| w[(i, k)]).collect();
        v[0] -= alpha;
        let vnorm2: T = v.iter().map(|&x| x * x).sum();
        if vnorm2.to_f64() == 0.0 {
            continue;
        }
        for j in k..n {
            let dot: T = v.iter().enumerate().map(|(t, &vi)| vi * w[(k + t, j)]).sum();
            let f = T::from_f64(2.0) * dot / vnorm2;
            for (t, &vi) in v.iter().enumerate() {
                w[(k + t, j)] -= f * vi;
            }
        }
    }
    let mut r = Matrix::from_fn(n, n, |i, j| if j >= i { w[(i, j)] } else { T::zero() });
    for i in 0..n {
        if r[(i, i)] < T::zero() {
            for j in i..n {
                r[(i, j)] = -r[(i, j)];
            }
        }
    }
    r
}

/// Inverse of an upper triangular matrix.
pub fn upper_triangular_inverse<T: Real>(r: &Matrix<T>) -> Matrix<T> {
    let n = r.rows;
    let mut inv = Matrix::zeros(n, n);
    for j in 0..n {
        inv[(j, j)] = T::one() / r[(j, j)];
        for i in (0..j).rev() {
            let s: T = (i + 1..=j).map(|k| r[(i, k)] * inv[(k, j)]).sum();
            inv[(i, j)] = -s / r[(i, i)];
        }
    }
    inv
}

/// Thin singular value decomposition `A = U diag(s) V^T`.
#[derive(Debug, Clone)]
pub struct Svd<T> {
    pub u: Matrix<T>,
    pub s: Vec<T>,
    pub v: Matrix<T>,
}

/// One-sided Jacobi SVD. Works on `A` if tall, on `A^T` otherwise.
pub fn svd<T: Real>(a: &Matrix<T>) -> Svd<T> {
    if a.rows < a.cols {
        let t = svd(&a.transpose());
        return Svd { u: t.v, s: t.s, v: t.u };
    }
    let (m, n) = (a.rows, a.cols);
    let mut u = a.clone();
    let mut v = Matrix::<T>::identity(n);
    let tol = T::EPSILON;
    for _sweep in 0..80 {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in p + 1..n {
                let mut alpha = T::zero();
                let mut beta = T::zero();
                let mut gamma = T::zero();
                for i in 0..m {
                    let up = u[(i, p)];
                    let uq = u[(i, q)];
                    alpha += up * up;
                    beta += uq * uq;
                    gamma += up * uq;
                }
                let g = gamma.abs().to_f64();
                let scale = (alpha * beta).sqrt().to_f64();
                if g == 0.0 || g <= tol * scale {
                    continue;
                }
                off = off.max(g / scale);
                let zeta = (beta - alpha) / (T::from_f64(2.0) * gamma);
                let sign = if zeta < T::zero() { -T::one() } else { T::one() };
                let t = sign / (zeta.abs() + (T::one() + zeta * zeta).sqrt());
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = c * t;
                for i in 0..m {
                    let up = u[(i, p)];
                    let uq = u[(i, q)];
                    u[(i, p)] = c * up - s * uq;
                    u[(i, q)] = s * up + c * uq;
                }
                for i in 0..n {
                    let vp = v[(i, p)];
                    let vq = v[(i, q)];
                    v[(i, p)] = c * vp - s * vq;
                    v[(i, q)] = s * vp + c * vq;
                }
            }
        }
        if off <= tol {
            break;
        }
    }
    let mut s = vec![T::zero(); n];
    for j in 0..n {
        let norm = (0..m).map(|i| u[(i, j)] * u[(i, j)]).sum::<T>().sqrt();
        s[j] = norm;
        if norm.to_f64() > 0.0 {
            for i in 0..m {
                u[(i, j)] /= norm;
            }
        }
    }
    Svd { u, s, v }
}

/// Result of a minimum-norm least-squares solve.
#[derive(Debug, Clone)]
pub struct LstsqSolution<T> {
    pub x: Vec<T>,
    /// Numerical rank used for the pseudo-inverse.
    pub rank: usize,
    /// Euclidean norm of `A x - b`.
    pub residual_norm: T,
}

/// Minimum-norm solution of `min ||A x - b||` via the SVD pseudo-inverse.
/// Singular values below `rcond * s_max` are treated as zero.
pub fn lstsq<T: Real>(a: &Matrix<T>, b: &[T], rcond: f64) -> LstsqSolution<T> {
    assert_eq!(a.rows, b.len());
    let dec = svd(a);
    let smax = dec.s.iter().map(|s| s.to_f64()).fold(0.0, f64::max);
    let cut = rcond * smax;
    let mut x = vec![T::zero(); a.cols];
    let mut rank = 0;
    for (k, &sk) in dec.s.iter().enumerate() {
        if sk.to_f64() <= cut || sk.to_f64() == 0.0 {
            continue;
        }
        rank += 1;
        let coef: T = (0..a.rows).map(|i| dec.u[(i, k)] * b[i]).sum::<T>() / sk;
        for (j, xj) in x.iter_mut().enumerate() {
            *xj += coef * dec.v[(j, k)];
        }
    }
    let ax = a.mul_vec(&x);
    let residual_norm = ax.iter().zip(b).map(|(&p, &q)| (p - q) * (p - q)).sum::<T>().sqrt();
    LstsqSolution { x, rank, residual_norm }
}

/// Numerical rank with relative cutoff `rcond`.
pub fn rank<T: Real>(a: &Matrix<T>, rcond: f64) -> usize {
    let s = svd(a).s;
    let smax = s.iter().map(|v| v.to_f64()).fold(0.0, f64::max);
    s.iter().filter(|v| v.to_f64() > rcond * smax && v.to_f64() > 0.0).count()
}

/// Solves `A x = b` for symmetric positive definite `A`; `None` if the
/// factorization breaks down.
pub fn cholesky_solve<T: Real>(a: &Matrix<T>, b: &[T]) -> Option<Vec<T>> {
    let n = a.rows;
    let mut l = Matrix::<T>::zeros(n, n);
    for j in 0..n {
        let mut d = a[(j, j)];
        for k in 0..j {
            d -= l[(j, k)] * l[(j, k)];
        }
        if !(d > T::zero()) || !d.is_finite() {
            return None;
        }
        let djj = d.sqrt();
        l[(j, j)] = djj;
        for i in j + 1..n {
            let mut s = a[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = s / djj;
        }
    }
    let mut y = vec![T::zero(); n];
    for i in 0..n {
        let s: T = (0..i).map(|k| l[(i, k)] * y[k]).sum();
        y[i] = (b[i] - s) / l[(i, i)];
    }
    let mut x = vec![T::zero(); n];
    for i in (0..n).rev() {
        let s: T = (i + 1..n).map(|k| l[(k, i)] * x[k]).sum();
        x[i] = (y[i] - s) / l[(i, i)];
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::real::Dd;

    fn sample() -> Matrix<f64> {
        Matrix::from_rows(&[vec![4.0, 1.0, 2.0], vec![1.0, 3.0, 0.5], vec![2.0, 0.5, 5.0], vec![1.0, 1.0, 1.0]])
    }

    #[test]
    fn svd_reconstructs() {
        let a = sample();
        let d = svd(&a);
        let us = Matrix::from_fn(4, 3, |i, j| d.u[(i, j)] * d.s[j]);
        let back = us.matmul(&d.v.transpose());
        assert!(back.max_abs_diff(&a) < 1e-13);
        let wide = a.transpose();
        let d = svd(&wide);
        let us = Matrix::from_fn(3, 3, |i, j| d.u[(i, j)] * d.s[j]);
        assert!(us.matmul(&d.v.transpose()).max_abs_diff(&wide) < 1e-13);
    }

    #[test]
    fn svd_matches_nalgebra() {
        let a = sample();
        let na = nalgebra::DMatrix::from_row_slice(4, 3, &a.data);
        let mut ours = svd(&a).s;
        ours.sort_by(|x, y| y.partial_cmp(x).unwrap());
        let theirs = na.svd(false, false).singular_values;
        for (x, y) in ours.iter().zip(theirs.iter()) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn lstsq_minimum_norm_on_rank_deficient() {
        // duplicate column: x1 + x2 = 2 has min-norm solution (1, 1)
        let a = Matrix::from_rows(&[vec![1.0, 1.0], vec![2.0, 2.0]]);
        let sol = lstsq(&a, &[2.0, 4.0], 1e-12);
        assert_eq!(sol.rank, 1);
        assert!((sol.x[0] - 1.0).abs() < 1e-14 && (sol.x[1] - 1.0).abs() < 1e-14);
        assert!(sol.residual_norm < 1e-14);
    }

    #[test]
    fn lstsq_overdetermined_matches_normal_equations() {
        let a = sample();
        let b = [1.0, 2.0, 3.0, 4.0];
        let sol = lstsq(&a, &b, 1e-14);
        let at = a.transpose();
        let ata = at.matmul(&a);
        let atb = at.mul_vec(&b);
        let x = cholesky_solve(&ata, &atb).unwrap();
        for (p, q) in sol.x.iter().zip(&x) {
            assert!((p - q).abs() < 1e-12);
        }
    }

    #[test]
    fn qr_gives_gram_factor() {
        let a = sample();
        let r = qr_r(&a);
        let rtr = r.transpose().matmul(&r);
        let ata = a.transpose().matmul(&a);
        assert!(rtr.max_abs_diff(&ata) < 1e-12);
        let inv = upper_triangular_inverse(&r);
        assert!(r.matmul(&inv).max_abs_diff(&Matrix::identity(3)) < 1e-14);
    }

    #[test]
    fn extended_precision_lstsq() {
        let a = sample().map(Dd::from_f64);
        let b: Vec<Dd> = [1.0, 2.0, 3.0, 4.0].iter().map(|&v| Dd::from_f64(v)).collect();
        let sol = lstsq(&a, &b, 1e-28);
        let at = a.transpose();
        let x = cholesky_solve(&at.matmul(&a), &at.mul_vec(&b)).unwrap();
        for (p, q) in sol.x.iter().zip(&x) {
            assert!((*p - *q).abs().to_f64() < 1e-28);
        }
    }

    #[test]
    fn cholesky_rejects_indefinite() {
        let a = Matrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 1.0]]);
        assert!(cholesky_solve(&a, &[1.0, 1.0]).is_none());
    }
}
