//! Orthonormal modal bases on the reference elements.
//!
//! Each basis function is a product of orthonormal Jacobi polynomials in
//! collapsed coordinates `(a, b, c, d)`, with the collapse factors
//! `(1-b)^i (1-c)^(i+j) (1-d)^(i+j+k)` that make the product a polynomial in
//! `x`. The leading constants are 1 (tesseract), `sqrt(8)` (tetrahedral
//! prism) and 8 (pentatope), which give `psi_0000 = 1/sqrt(volume)`.

use crate::elements::{contains, duffy_nodes, ElementKind, Point4, ReferenceFrame};
use crate::error::{param_err, Error, Result};
use crate::jacobi::{jacobi_orthonormal_all, JacobiParams};
use crate::linalg::Matrix;
use crate::par::{map_indexed, Execution};
use crate::real::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiIndex {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub q: usize,
}

impl MultiIndex {
    pub const fn new(i: usize, j: usize, k: usize, q: usize) -> Self {
        MultiIndex { i, j, k, q }
    }

    pub fn total(&self) -> usize {
        self.i + self.j + self.k + self.q
    }

    pub fn as_array(&self) -> [usize; 4] {
        [self.i, self.j, self.k, self.q]
    }

    pub fn is_admissible(&self, kind: ElementKind, p: usize) -> bool {
        let MultiIndex { i, j, k, q } = *self;
        match kind {
            ElementKind::Tesseract => i.max(j).max(k).max(q) <= p,
            ElementKind::TetPrism => i + j + k <= p && q <= p,
            ElementKind::Pentatope => i + j + k + q <= p,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BasisSet {
    pub kind: ElementKind,
    pub degree: usize,
    pub indices: Vec<MultiIndex>,
}

impl BasisSet {
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }
}

pub const MAX_BASIS_DEGREE: usize = 20;

pub fn n_dof(kind: ElementKind, p: usize) -> usize {
    match kind {
        ElementKind::Tesseract => (p + 1).pow(4),
        ElementKind::TetPrism => (p + 1) * (p + 1) * (p + 2) * (p + 3) / 6,
        ElementKind::Pentatope => (p + 1) * (p + 2) * (p + 3) * (p + 4) / 24,
    }
}

/// All admissible indices in graded lexicographic order (`i` slowest).
pub fn basis_set(kind: ElementKind, p: usize) -> Result<BasisSet> {
    if p > MAX_BASIS_DEGREE {
        return Err(param_err!("basis degree must be at most {MAX_BASIS_DEGREE}, got {p}"));
    }
    let mut indices = Vec::with_capacity(n_dof(kind, p));
    for i in 0..=p {
        for j in 0..=p {
            for k in 0..=p {
                for q in 0..=p {
                    let m = MultiIndex { i, j, k, q };
                    if m.is_admissible(kind, p) {
                        indices.push(m);
                    }
                }
            }
        }
    }
    indices.sort_by_key(|m| (m.total(), m.i, m.j, m.k, m.q));
    Ok(BasisSet { kind, degree: p, indices })
}

/// Collapsed coordinates without a containment check.
pub fn collapsed_coords_unchecked<T: Real>(kind: ElementKind, x: &Point4<T>) -> [T; 4] {
    let one = T::one();
    let two = T::from_f64(2.0);
    match kind {
        ElementKind::Tesseract => *x,
        ElementKind::TetPrism => {
            let da = x[1] + x[2];
            let a = if da.abs().to_f64() <= 1e-300 { -one } else { -two * (one + x[0]) / da - one };
            let db = one - x[2];
            let b = if db.abs().to_f64() <= 1e-300 { -one } else { two * (one + x[1]) / db - one };
            [clamp1(a), clamp1(b), x[2], x[3]]
        }
        ElementKind::Pentatope => {
            let da = x[1] + x[2] + x[3] + one;
            let a = if da.abs().to_f64() <= 1e-300 { -one } else { -two * (x[0] + one) / da - one };
            let db = x[2] + x[3];
            let b = if db.abs().to_f64() <= 1e-300 { -one } else { -two * (one + x[1]) / db - one };
            let dc = one - x[3];
            let c = if dc.abs().to_f64() <= 1e-300 { -one } else { two * (one + x[2]) / dc - one };
            [clamp1(a), clamp1(b), clamp1(c), x[3]]
        }
    }
}

fn clamp1<T: Real>(v: T) -> T {
    v.max(-T::one()).min(T::one())
}

/// Collapsed coordinates `(a, b, c, d)`; vanishing denominators give `-1`.
pub fn collapsed_coords<T: Real>(kind: ElementKind, x: &Point4<T>) -> Result<[T; 4]> {
    check_inside(kind, x)?;
    Ok(collapsed_coords_unchecked(kind, x))
}

fn check_inside<T: Real>(kind: ElementKind, x: &Point4<T>) -> Result<()> {
    let xf = x.map(|v| v.to_f64());
    if contains(ReferenceFrame::reference(kind), &xf, 1e-10) {
        Ok(())
    } else {
        Err(Error::Domain(format!("{xf:?} is outside the reference {kind}")))
    }
}

fn leading_constant<T: Real>(kind: ElementKind) -> T {
    match kind {
        ElementKind::Tesseract => T::one(),
        ElementKind::TetPrism => T::from_f64(8.0).sqrt(),
        ElementKind::Pentatope => T::from_f64(8.0),
    }
}

/// Evaluates `psi_idx` at `x`.
pub fn basis_eval<T: Real>(kind: ElementKind, idx: MultiIndex, x: &Point4<T>) -> Result<T> {
    if !idx.is_admissible(kind, MAX_BASIS_DEGREE) {
        return Err(param_err!("inadmissible index {idx:?}"));
    }
    check_inside(kind, x)?;
    let [a, b, c, d] = collapsed_coords_unchecked(kind, x);
    let MultiIndex { i, j, k, q } = idx;
    let one = T::one();
    let jac =
        |n: usize, alpha: usize, t: T| -> T { jacobi_orthonormal_all(n, JacobiParams::alpha_only(alpha as u32), t)[n] };
    Ok(match kind {
        ElementKind::Tesseract => jac(i, 0, a) * jac(j, 0, b) * jac(k, 0, c) * jac(q, 0, d),
        ElementKind::TetPrism => {
            leading_constant::<T>(kind)
                * jac(i, 0, a)
                * jac(j, 2 * i + 1, b)
                * jac(k, 2 * i + 2 * j + 2, c)
                * jac(q, 0, d)
                * (one - b).powi(i as i32)
                * (one - c).powi((i + j) as i32)
        }
        ElementKind::Pentatope => {
            leading_constant::<T>(kind)
                * jac(i, 0, a)
                * jac(j, 2 * i + 1, b)
                * jac(k, 2 * i + 2 * j + 2, c)
                * jac(q, 2 * i + 2 * j + 2 * k + 3, d)
                * (one - b).powi(i as i32)
                * (one - c).powi((i + j) as i32)
                * (one - d).powi((i + j + k) as i32)
        }
    })
}

/// Evaluates every function of a basis set at one point, reusing the 1D
/// recurrences. The point is not range-checked.
pub fn eval_all<T: Real>(set: &BasisSet, x: &Point4<T>) -> Vec<T> {
    let kind = set.kind;
    let p = set.degree;
    let [a, b, c, d] = collapsed_coords_unchecked(kind, x);
    let one = T::one();
    let leg = |t: T| jacobi_orthonormal_all(p, JacobiParams::LEGENDRE, t);
    match kind {
        ElementKind::Tesseract => {
            let (pa, pb, pc, pd) = (leg(a), leg(b), leg(c), leg(d));
            set.indices.iter().map(|m| pa[m.i] * pb[m.j] * pc[m.k] * pd[m.q]).collect()
        }
        ElementKind::TetPrism | ElementKind::Pentatope => {
            let pa = leg(a);
            let pb: Vec<Vec<T>> =
                (0..=p).map(|i| jacobi_orthonormal_all(p - i, JacobiParams::alpha_only(2 * i as u32 + 1), b)).collect();
            let pc: Vec<Vec<T>> =
                (0..=p).map(|s| jacobi_orthonormal_all(p - s, JacobiParams::alpha_only(2 * s as u32 + 2), c)).collect();
            let pd: Vec<Vec<T>> = if kind == ElementKind::Pentatope {
                (0..=p).map(|s| jacobi_orthonormal_all(p - s, JacobiParams::alpha_only(2 * s as u32 + 3), d)).collect()
            } else {
                vec![leg(d)]
            };
            let lead = leading_constant::<T>(kind);
            let powers = |base: T| -> Vec<T> {
                let mut v = vec![one; p + 1];
                for n in 1..=p {
                    v[n] = v[n - 1] * base;
                }
                v
            };
            let (ob, oc, od) = (powers(one - b), powers(one - c), powers(one - d));
            set.indices
                .iter()
                .map(|m| {
                    let MultiIndex { i, j, k, q } = *m;
                    let base = lead * pa[i] * pb[i][j] * pc[i + j][k] * ob[i] * oc[i + j];
                    if kind == ElementKind::Pentatope {
                        base * pd[i + j + k][q] * od[i + j + k]
                    } else {
                        base * pd[0][q]
                    }
                })
                .collect()
        }
    }
}

/// Gram matrix of `basis_set(kind, p)` under the Duffy rule with
/// `oracle_points` points per axis.
pub fn gram_matrix<T: Real>(kind: ElementKind, p: usize, oracle_points: usize, exec: Execution) -> Result<Matrix<T>> {
    if oracle_points < 2 * p + 4 {
        return Err(param_err!("oracle needs at least {} points per axis, got {oracle_points}", 2 * p + 4));
    }
    let set = basis_set(kind, p)?;
    let (pts, wts) = duffy_nodes::<T>(kind, oracle_points)?;
    let n = set.len();
    // fixed chunking keeps the result independent of the thread count
    let n_chunks = pts.len().min(8);
    let chunk = pts.len().div_ceil(n_chunks);
    let partials: Vec<Vec<T>> = map_indexed(exec, n_chunks, |c| {
        let range = c * chunk..((c + 1) * chunk).min(pts.len());
        let vals: Vec<Vec<T>> = range.clone().map(|idx| eval_all(&set, &pts[idx])).collect();
        let mut g = vec![T::zero(); n * n];
        // row tiles keep the touched part of `g` in cache
        const TILE: usize = 32;
        let ws: Vec<T> = range.map(|idx| wts[idx]).collect();
        for r0 in (0..n).step_by(TILE) {
            let mut k = 0;
            while k + 4 <= vals.len() {
                let [v0, v1, v2, v3] = [&vals[k], &vals[k + 1], &vals[k + 2], &vals[k + 3]];
                for r in r0..(r0 + TILE).min(n) {
                    let a = [ws[k] * v0[r], ws[k + 1] * v1[r], ws[k + 2] * v2[r], ws[k + 3] * v3[r]];
                    let row = g[r * n + r..(r + 1) * n].iter_mut();
                    for ((((gs, &x0), &x1), &x2), &x3) in row.zip(&v0[r..]).zip(&v1[r..]).zip(&v2[r..]).zip(&v3[r..]) {
                        *gs += a[0] * x0 + a[1] * x1 + a[2] * x2 + a[3] * x3;
                    }
                }
                k += 4;
            }
            for (v, &w) in vals[k..].iter().zip(&ws[k..]) {
                for r in r0..(r0 + TILE).min(n) {
                    let wr = w * v[r];
                    for (gs, &vs) in g[r * n + r..(r + 1) * n].iter_mut().zip(&v[r..]) {
                        *gs += wr * vs;
                    }
                }
            }
        }
        g
    });
    let mut m = Matrix::zeros(n, n);
    for r in 0..n {
        for s in r..n {
            let col: Vec<T> = partials.iter().map(|g| g[r * n + s]).collect();
            let v = crate::par::tree_sum(&col);
            m[(r, s)] = v;
            m[(s, r)] = v;
        }
    }
    Ok(m)
}

/// Coefficients of the orthogonal projection of `f` onto the basis, computed
/// with the Duffy rule.
pub fn project<T: Real>(set: &BasisSet, oracle_points: usize, f: impl Fn(&Point4<T>) -> T) -> Result<Vec<T>> {
    let (pts, wts) = duffy_nodes::<T>(set.kind, oracle_points)?;
    let mut coef = vec![T::zero(); set.len()];
    for (x, &w) in pts.iter().zip(&wts) {
        let fx = f(x) * w;
        for (c, v) in coef.iter_mut().zip(eval_all(set, x)) {
            *c += fx * v;
        }
    }
    Ok(coef)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elements::{centroid, vertices};
    use crate::linalg::Matrix;

    #[test]
    fn dof_counts() {
        assert_eq!(basis_set(ElementKind::Pentatope, 2).unwrap().len(), 15);
        assert_eq!(basis_set(ElementKind::TetPrism, 1).unwrap().len(), 8);
        assert_eq!(basis_set(ElementKind::Tesseract, 3).unwrap().len(), 256);
        for kind in ElementKind::ALL {
            for p in 0..=8 {
                assert_eq!(basis_set(kind, p).unwrap().len(), n_dof(kind, p));
            }
        }
        assert!(basis_set(ElementKind::Pentatope, 21).is_err());
    }

    #[test]
    fn ordering_is_graded_lex() {
        let s = basis_set(ElementKind::Pentatope, 2).unwrap();
        assert_eq!(s.indices[0], MultiIndex::new(0, 0, 0, 0));
        assert_eq!(s.indices[1], MultiIndex::new(0, 0, 0, 1));
        assert_eq!(s.indices[4], MultiIndex::new(1, 0, 0, 0));
        assert_eq!(s.indices[5], MultiIndex::new(0, 0, 0, 2));
    }

    #[test]
    fn collapsed_examples() {
        let x = [0.1, 0.2, 0.3, 0.4];
        assert_eq!(collapsed_coords(ElementKind::Tesseract, &x).unwrap(), x);
        let c = collapsed_coords(ElementKind::Pentatope, &[-0.6; 4]).unwrap();
        let expected = [0.0, -1.0 / 3.0, -0.5, -0.6];
        for i in 0..4 {
            assert!((c[i] - expected[i]).abs() < 1e-15, "{c:?}");
        }
        let c = collapsed_coords(ElementKind::TetPrism, &[-1.0, -0.5, 0.5, 0.0]).unwrap();
        assert_eq!(c[0], -1.0);
        assert!(collapsed_coords(ElementKind::Pentatope, &[0.0; 4]).is_err());
    }

    #[test]
    fn constant_function() {
        let expect = [0.25, (3.0f64 / 8.0).sqrt(), 1.5f64.sqrt()];
        for (kind, e) in ElementKind::ALL.iter().zip(expect) {
            let v = basis_eval(*kind, MultiIndex::new(0, 0, 0, 0), &centroid(*kind)).unwrap();
            assert!((v - e).abs() < 1e-15, "{kind}: {v}");
        }
    }

    #[test]
    fn tesseract_linear() {
        let v = basis_eval(ElementKind::Tesseract, MultiIndex::new(1, 0, 0, 0), &[0.5, 0.0, 0.0, 0.0]).unwrap();
        let expected = 1.5f64.sqrt() * 0.5 * (0.5f64).sqrt().powi(3);
        assert!((v - expected).abs() < 1e-15);
    }

    #[test]
    fn pentatope_q1_at_centroid() {
        // P_1^{(3,0)}(x) = (5x + 3)/2, h_1 = 16 * 4! * 1! / (6 * 1! * 4!) = 8/3
        let p1 = (5.0 * -0.6 + 3.0) / 2.0;
        let phat = p1 / (8.0f64 / 3.0).sqrt();
        let c0 = 1.0 / 2f64.sqrt() * (1.0 / 2f64.sqrt()) * (3.0f64 / 8.0).sqrt();
        let expected = 8.0 * c0 * phat;
        let v = basis_eval(ElementKind::Pentatope, MultiIndex::new(0, 0, 0, 1), &[-0.6; 4]).unwrap();
        assert!((v - expected).abs() < 1e-15, "{v} vs {expected}");
        assert!(v.abs() < 1e-15);
        // away from the centroid psi_0001 only depends on x4
        let x4 = 0.05;
        let expected = 8.0 * c0 * (5.0 * x4 + 3.0) / 2.0 / (8.0f64 / 3.0).sqrt();
        let v = basis_eval(ElementKind::Pentatope, MultiIndex::new(0, 0, 0, 1), &[-0.7, -0.5, -0.9, x4]).unwrap();
        assert!((v - expected).abs() < 1e-14, "{v} vs {expected}");
    }

    #[test]
    fn vertices_finite() {
        for kind in ElementKind::ALL {
            let set = basis_set(kind, 4).unwrap();
            for v in vertices(kind) {
                for m in &set.indices {
                    assert!(basis_eval(kind, *m, &v).unwrap().is_finite());
                }
            }
        }
    }

    #[test]
    fn batch_matches_single() {
        for kind in ElementKind::ALL {
            let set = basis_set(kind, 4).unwrap();
            let x = match kind {
                ElementKind::Tesseract => [0.3, -0.2, 0.7, -0.9],
                ElementKind::TetPrism => [-0.8, -0.4, 0.1, 0.6],
                ElementKind::Pentatope => [-0.7, -0.5, -0.9, 0.05],
            };
            let all = eval_all(&set, &x);
            for (m, v) in set.indices.iter().zip(all) {
                assert!((v - basis_eval(kind, *m, &x).unwrap()).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn gram_is_identity_small() {
        let tol = [1e-12, 1e-9, 1e-10];
        let degrees = [2, 4, 3];
        for ((kind, tol), p) in ElementKind::ALL.iter().zip(tol).zip(degrees) {
            let g: Matrix<f64> = gram_matrix(*kind, p, 2 * p + 4, Execution::Parallel).unwrap();
            let err = g.max_abs_diff(&Matrix::identity(g.rows()));
            assert!(err < tol, "{kind}: {err}");
        }
        assert!(gram_matrix::<f64>(ElementKind::Pentatope, 3, 9, Execution::Sequential).is_err());
    }
}
