//! Reference geometry of the tesseract, tetrahedral prism and pentatope.
//!
//! Two frames are used. The *reference* elements live in `[-1, 1]`-based
//! coordinates (volumes 16, 8/3, 2/3) and are where bases and rules are
//! defined. The *unit* elements are their images under `u = (x + 1) / 2`:
//! the unit 4-cube, the unit tetrahedron in `(u1, u2, u3)` extruded over
//! `u4 in [0, 1]`, and the unit 4-simplex `{u >= 0, sum u <= 1}`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{param_err, Error, Result};
use crate::jacobi::gauss_legendre;
use crate::real::Real;

/// A point in 4D; `[x1, x2, x3, x4]`.
pub type Point4<T = f64> = [T; 4];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ElementKind {
    Tesseract,
    TetPrism,
    Pentatope,
}

impl ElementKind {
    pub const ALL: [ElementKind; 3] = [ElementKind::Tesseract, ElementKind::TetPrism, ElementKind::Pentatope];

    pub fn name(self) -> &'static str {
        match self {
            ElementKind::Tesseract => "tesseract",
            ElementKind::TetPrism => "tetprism",
            ElementKind::Pentatope => "pentatope",
        }
    }

    /// Number of vertices.
    pub fn n_vertices(self) -> usize {
        match self {
            ElementKind::Tesseract => 16,
            ElementKind::TetPrism => 8,
            ElementKind::Pentatope => 5,
        }
    }
}

impl fmt::Display for ElementKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ElementKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "tesseract" | "hypercube" => Ok(ElementKind::Tesseract),
            "tetprism" | "tet-prism" | "tetrahedral-prism" | "prism" => Ok(ElementKind::TetPrism),
            "pentatope" | "simplex" => Ok(ElementKind::Pentatope),
            _ => Err(param_err!("unknown element {s:?}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    Reference,
    Unit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ReferenceFrame {
    pub kind: ElementKind,
    pub variant: Variant,
}

impl ReferenceFrame {
    pub fn reference(kind: ElementKind) -> Self {
        ReferenceFrame { kind, variant: Variant::Reference }
    }

    pub fn unit(kind: ElementKind) -> Self {
        ReferenceFrame { kind, variant: Variant::Unit }
    }
}

/// Exact volume of the element in the given frame.
pub fn volume_exact(frame: ReferenceFrame) -> BigRational {
    let unit = match frame.kind {
        ElementKind::Tesseract => rat(1, 1),
        ElementKind::TetPrism => rat(1, 6),
        ElementKind::Pentatope => rat(1, 24),
    };
    match frame.variant {
        Variant::Unit => unit,
        Variant::Reference => unit * rat(16, 1),
    }
}

pub fn volume(frame: ReferenceFrame) -> f64 {
    <f64 as Real>::from_rational(&volume_exact(frame))
}

pub fn volume_real<T: Real>(frame: ReferenceFrame) -> T {
    T::from_rational(&volume_exact(frame))
}

/// Tests the bounding inequalities with slack `tol`.
pub fn contains(frame: ReferenceFrame, p: &Point4, tol: f64) -> bool {
    let x = match frame.variant {
        Variant::Reference => *p,
        Variant::Unit => unit_to_reference(p),
    };
    // in reference coordinates the slack doubles
    let tol = match frame.variant {
        Variant::Reference => tol,
        Variant::Unit => 2.0 * tol,
    };
    if x.iter().any(|v| !v.is_finite()) {
        return false;
    }
    match frame.kind {
        ElementKind::Tesseract => x.iter().all(|v| v.abs() <= 1.0 + tol),
        ElementKind::TetPrism => {
            x[..3].iter().all(|&v| v >= -1.0 - tol)
                && x[1] + x[2] <= tol
                && x[0] + x[1] + x[2] <= -1.0 + tol
                && x[3].abs() <= 1.0 + tol
        }
        ElementKind::Pentatope => x.iter().all(|&v| v >= -1.0 - tol) && x.iter().sum::<f64>() <= -2.0 + tol,
    }
}

/// Strict interior test with margin `tol` (used by rule admissibility).
pub fn strictly_inside(kind: ElementKind, p: &Point4, margin: f64) -> bool {
    contains(ReferenceFrame::reference(kind), p, -margin)
}

pub fn unit_to_reference<T: Real>(u: &Point4<T>) -> Point4<T> {
    u.map(|v| T::from_f64(2.0) * v - T::one())
}

pub fn reference_to_unit<T: Real>(x: &Point4<T>) -> Point4<T> {
    x.map(|v| (v + T::one()) / T::from_f64(2.0))
}

/// Barycentric coordinates: five `lambdas` for the pentatope, four plus the
/// extrusion coordinate `x4` for the tetrahedral prism.
#[derive(Debug, Clone, PartialEq)]
pub struct Barycentric<T = f64> {
    pub lambdas: Vec<T>,
    pub x4: T,
}

impl<T: Real> Barycentric<T> {
    pub fn pentatope(lambdas: [T; 5]) -> Self {
        Barycentric { lambdas: lambdas.to_vec(), x4: T::zero() }
    }

    pub fn tet_prism(lambdas: [T; 4], x4: T) -> Self {
        Barycentric { lambdas: lambdas.to_vec(), x4 }
    }

    /// Checks `0 <= lambda_i <= 1`, `sum = 1` and `|x4| <= 1`, all within `tol`.
    pub fn validate(&self, kind: ElementKind, tol: f64) -> Result<()> {
        let expected = match kind {
            ElementKind::Pentatope => 5,
            ElementKind::TetPrism => 4,
            ElementKind::Tesseract => return Err(Error::UnsupportedKind("tesseract".into())),
        };
        if self.lambdas.len() != expected {
            return Err(param_err!("{kind} needs {expected} barycentric coordinates"));
        }
        let sum: f64 = self.lambdas.iter().map(|l| l.to_f64()).sum();
        let in_range = self.lambdas.iter().all(|l| (-tol..=1.0 + tol).contains(&l.to_f64()));
        if !in_range || (sum - 1.0).abs() > tol.max(1e-12) || self.x4.to_f64().abs() > 1.0 + tol {
            return Err(Error::Domain(format!("invalid barycentric coordinates {:?}", self)));
        }
        Ok(())
    }
}

/// Vertex columns of the reference simplex: `-1` everywhere except `+1` in
/// row `j - 1` for column `j >= 1`.
fn simplex_column_entry(row: usize, col: usize) -> f64 {
    if col >= 1 && row == col - 1 {
        1.0
    } else {
        -1.0
    }
}

pub fn bary_to_cart<T: Real>(kind: ElementKind, b: &Barycentric<T>) -> Result<Point4<T>> {
    let n = match kind {
        ElementKind::Tesseract => return Err(Error::UnsupportedKind("tesseract has no barycentric map".into())),
        ElementKind::TetPrism => 4,
        ElementKind::Pentatope => 5,
    };
    if b.lambdas.len() != n {
        return Err(param_err!("{kind} needs {n} barycentric coordinates, got {}", b.lambdas.len()));
    }
    let rows = n - 1;
    let mut x = [T::zero(); 4];
    for (r, xr) in x.iter_mut().enumerate().take(rows) {
        for (c, &l) in b.lambdas.iter().enumerate() {
            *xr += T::from_f64(simplex_column_entry(r, c)) * l;
        }
    }
    if kind == ElementKind::TetPrism {
        x[3] = b.x4;
    }
    Ok(x)
}

/// Reference-frame vertices in matrix-column order (for the prism, the
/// four tetrahedron columns at `x4 = -1`, then at `x4 = +1`).
pub fn vertices(kind: ElementKind) -> Vec<Point4> {
    match kind {
        ElementKind::Tesseract => {
            (0..16).map(|b| std::array::from_fn(|i| if (b >> i) & 1 == 1 { 1.0 } else { -1.0 })).collect()
        }
        ElementKind::Pentatope => (0..5).map(|c| std::array::from_fn(|r| simplex_column_entry(r, c))).collect(),
        ElementKind::TetPrism => [-1.0, 1.0]
            .iter()
            .flat_map(|&t| {
                (0..4).map(move |c| std::array::from_fn(|r| if r == 3 { t } else { simplex_column_entry(r, c) }))
            })
            .collect(),
    }
}

pub fn centroid(kind: ElementKind) -> Point4 {
    match kind {
        ElementKind::Tesseract => [0.0; 4],
        ElementKind::TetPrism => [-0.5, -0.5, -0.5, 0.0],
        ElementKind::Pentatope => [-0.6; 4],
    }
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

fn binomial(n: u32, k: u32) -> BigInt {
    factorial(n) / (factorial(k) * factorial(n - k))
}

/// Maximum total degree accepted by [`monomial_integral_exact`].
pub const MAX_MONOMIAL_DEGREE: u32 = 40;

fn unit_integral(kind: ElementKind, e: [u32; 4]) -> BigRational {
    let [r, s, t, v] = e;
    match kind {
        ElementKind::Tesseract => BigRational::new(
            BigInt::one(),
            BigInt::from((r + 1) as u64 * (s + 1) as u64 * (t + 1) as u64 * (v + 1) as u64),
        ),
        // tetrahedron in (u1, u2, u3), extruded in u4
        ElementKind::TetPrism => {
            BigRational::new(factorial(r) * factorial(s) * factorial(t), factorial(r + s + t + 3) * BigInt::from(v + 1))
        }
        ElementKind::Pentatope => {
            BigRational::new(factorial(r) * factorial(s) * factorial(t) * factorial(v), factorial(r + s + t + v + 4))
        }
    }
}

/// Exact integral of `x1^r x2^s x3^t x4^v` over the element.
///
/// In the unit frame the tetrahedral prism is extruded along `u4`, so its
/// closed form is `r! s! t! / ((r+s+t+3)! (v+1))`; listing the extruded
/// exponent first gives the equivalent `s!t!v!/((r+1)(s+t+v+3)!)` labelling.
pub fn monomial_integral_exact(frame: ReferenceFrame, e: [u32; 4]) -> Result<BigRational> {
    let deg: u32 = e.iter().sum();
    if deg > MAX_MONOMIAL_DEGREE {
        return Err(param_err!("monomial degree {deg} exceeds {MAX_MONOMIAL_DEGREE}"));
    }
    if frame.variant == Variant::Unit {
        return Ok(unit_integral(frame.kind, e));
    }
    // x = 2u - 1, dx = 16 du; expand prod (2u_i - 1)^{e_i}
    let mut total = BigRational::zero();
    let mut idx = [0u32; 4];
    loop {
        let mut coef = BigInt::one();
        for i in 0..4 {
            let k = idx[i];
            let c = binomial(e[i], k) * (BigInt::one() << k as usize);
            coef *= if (e[i] - k) % 2 == 1 { -c } else { c };
        }
        total += BigRational::from_integer(coef) * unit_integral(frame.kind, idx);
        // odometer over 0..=e_i
        let mut pos = 0;
        loop {
            if pos == 4 {
                return Ok(total * rat(16, 1));
            }
            idx[pos] += 1;
            if idx[pos] <= e[pos] {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
    }
}

pub fn monomial_integral<T: Real>(frame: ReferenceFrame, e: [u32; 4]) -> Result<T> {
    Ok(T::from_rational(&monomial_integral_exact(frame, e)?))
}

pub const MAX_DUFFY_POINTS: usize = 20;

/// Collapsed tensor rule on the reference n-simplex `{y >= -1, sum y <= 2 - n}`.
///
/// The last coordinate is collapsed outermost. Each collapsed axis carries
/// `((1 - t)/2)^(level - 1)`, so it gets `ceil((level - 1)/2)` extra
/// Gauss–Legendre points to integrate the Jacobian exactly; the rule is then
/// exact for total degree `2 npts - 1`.
fn simplex_rule<T: Real>(n: usize, npts: usize) -> Result<(Vec<Vec<T>>, Vec<T>)> {
    if n == 1 {
        let g = gauss_legendre::<T>(npts)?;
        return Ok((g.nodes.iter().map(|&x| vec![x]).collect(), g.weights));
    }
    let (inner_pts, inner_w) = simplex_rule::<T>(n - 1, npts)?;
    let g = gauss_legendre::<T>(npts + (n - 1).div_ceil(2))?;
    let half = T::from_f64(0.5);
    let mut pts = Vec::with_capacity(inner_pts.len() * g.len());
    let mut wts = Vec::with_capacity(pts.capacity());
    for (&t, &wt) in g.nodes.iter().zip(&g.weights) {
        let s = (T::one() - t) * half;
        let jac = s.powi((n - 1) as i32);
        for (yp, &wy) in inner_pts.iter().zip(&inner_w) {
            let mut y: Vec<T> = yp.iter().map(|&v| s * v - (T::one() + t) * half).collect();
            y.push(t);
            pts.push(y);
            wts.push(wt * wy * jac);
        }
    }
    Ok((pts, wts))
}

/// Tensor/collapsed product rule with `pts_per_axis` Gauss points per axis
/// (a few more on collapsed axes), as plain nodes and weights.
pub fn duffy_nodes<T: Real>(kind: ElementKind, pts_per_axis: usize) -> Result<(Vec<Point4<T>>, Vec<T>)> {
    if pts_per_axis == 0 || pts_per_axis > MAX_DUFFY_POINTS {
        return Err(param_err!("points per axis must be in 1..={MAX_DUFFY_POINTS}, got {pts_per_axis}"));
    }
    let to4 = |v: &[T]| -> Point4<T> { [v[0], v[1], v[2], v[3]] };
    match kind {
        ElementKind::Tesseract => {
            let (p, w) = tensor_cube::<T>(pts_per_axis)?;
            Ok((p.iter().map(|v| to4(v)).collect(), w))
        }
        ElementKind::Pentatope => {
            let (p, w) = simplex_rule::<T>(4, pts_per_axis)?;
            Ok((p.iter().map(|v| to4(v)).collect(), w))
        }
        ElementKind::TetPrism => {
            let (tp, tw) = simplex_rule::<T>(3, pts_per_axis)?;
            let g = gauss_legendre::<T>(pts_per_axis)?;
            let mut pts = Vec::with_capacity(tp.len() * g.len());
            let mut wts = Vec::with_capacity(pts.capacity());
            for (&t, &wt) in g.nodes.iter().zip(&g.weights) {
                for (y, &wy) in tp.iter().zip(&tw) {
                    pts.push([y[0], y[1], y[2], t]);
                    wts.push(wy * wt);
                }
            }
            Ok((pts, wts))
        }
    }
}

fn tensor_cube<T: Real>(npts: usize) -> Result<(Vec<Vec<T>>, Vec<T>)> {
    let g = gauss_legendre::<T>(npts)?;
    let mut pts = Vec::new();
    let mut wts = Vec::new();
    for (&x4, &w4) in g.nodes.iter().zip(&g.weights) {
        for (&x3, &w3) in g.nodes.iter().zip(&g.weights) {
            for (&x2, &w2) in g.nodes.iter().zip(&g.weights) {
                for (&x1, &w1) in g.nodes.iter().zip(&g.weights) {
                    pts.push(vec![x1, x2, x3, x4]);
                    wts.push(w1 * w2 * w3 * w4);
                }
            }
        }
    }
    Ok((pts, wts))
}

/// The Duffy rule as a [`crate::rules::QuadratureRule`] (no orbit data).
pub fn duffy_rule(kind: ElementKind, pts_per_axis: usize) -> Result<crate::rules::QuadratureRule> {
    let (pts, wts) = duffy_nodes::<crate::real::Dd>(kind, pts_per_axis)?;
    Ok(crate::rules::QuadratureRule::from_points(kind, 2 * pts_per_axis - 1, pts, wts, crate::rules::Provenance::Duffy))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::real::Dd;

    #[test]
    fn volumes() {
        assert_eq!(volume(ReferenceFrame::reference(ElementKind::Tesseract)), 16.0);
        assert_eq!(volume(ReferenceFrame::reference(ElementKind::Pentatope)), 2.0 / 3.0);
        assert_eq!(volume(ReferenceFrame::reference(ElementKind::TetPrism)), 8.0 / 3.0);
        assert_eq!(volume(ReferenceFrame::unit(ElementKind::Pentatope)), 1.0 / 24.0);
        assert_eq!(volume(ReferenceFrame::unit(ElementKind::TetPrism)), 1.0 / 6.0);
    }

    #[test]
    fn containment() {
        let pen = ReferenceFrame::reference(ElementKind::Pentatope);
        assert!(contains(pen, &[-0.6; 4], 0.0));
        assert!(!contains(pen, &[0.0; 4], 1e-12));
        assert!(!contains(ReferenceFrame::reference(ElementKind::Tesseract), &[1.0001, 0.0, 0.0, 0.0], 1e-8));
        for kind in ElementKind::ALL {
            for v in vertices(kind) {
                assert!(contains(ReferenceFrame::reference(kind), &v, 1e-12), "{kind} {v:?}");
                assert!(contains(ReferenceFrame::unit(kind), &reference_to_unit(&v), 1e-12));
            }
            assert!(strictly_inside(kind, &centroid(kind), 1e-3));
        }
    }

    #[test]
    fn barycentric_columns() {
        let mut l = [0.0; 5];
        l[1] = 1.0;
        assert_eq!(bary_to_cart(ElementKind::Pentatope, &Barycentric::pentatope(l)).unwrap(), [1.0, -1.0, -1.0, -1.0]);
        let c = bary_to_cart(ElementKind::Pentatope, &Barycentric::pentatope([0.2; 5])).unwrap();
        assert!(c.iter().all(|v| (v + 0.6).abs() < 1e-15));
        let p = bary_to_cart(ElementKind::TetPrism, &Barycentric::tet_prism([1.0, 0.0, 0.0, 0.0], 0.5)).unwrap();
        assert_eq!(p, [-1.0, -1.0, -1.0, 0.5]);
        assert!(bary_to_cart(ElementKind::Tesseract, &Barycentric::pentatope([0.2; 5])).is_err());
        assert!(Barycentric::pentatope([0.5, 0.5, 0.5, -0.5, 0.0]).validate(ElementKind::Pentatope, 1e-12).is_err());
    }

    #[test]
    fn unit_reference_roundtrip() {
        let u = [0.1, 0.25, 0.3, 0.7];
        let back = reference_to_unit(&unit_to_reference(&u));
        for i in 0..4 {
            assert!((back[i] - u[i]).abs() < 1e-15);
        }
    }

    #[test]
    fn closed_form_values() {
        let unit_pen = ReferenceFrame::unit(ElementKind::Pentatope);
        assert_eq!(monomial_integral_exact(unit_pen, [0; 4]).unwrap(), rat(1, 24));
        assert_eq!(
            monomial_integral_exact(ReferenceFrame::unit(ElementKind::Tesseract), [2, 0, 0, 0]).unwrap(),
            rat(1, 3)
        );
        assert!(monomial_integral_exact(ReferenceFrame::reference(ElementKind::Tesseract), [1, 0, 0, 0])
            .unwrap()
            .is_zero());
        for kind in ElementKind::ALL {
            assert_eq!(
                monomial_integral_exact(ReferenceFrame::reference(kind), [0; 4]).unwrap(),
                volume_exact(ReferenceFrame::reference(kind))
            );
        }
        assert!(monomial_integral_exact(unit_pen, [20, 21, 0, 0]).is_err());
    }

    #[test]
    fn duffy_volume() {
        for kind in ElementKind::ALL {
            for n in 1..=MAX_DUFFY_POINTS {
                let (_, w) = duffy_nodes::<f64>(kind, n).unwrap();
                let s = crate::par::tree_sum(&w);
                let vol = volume(ReferenceFrame::reference(kind));
                assert!((s - vol).abs() < 1e-13 * vol.max(1.0), "{kind} n={n}: {s}");
            }
        }
        assert!(duffy_nodes::<f64>(ElementKind::Pentatope, 0).is_err());
        assert!(duffy_nodes::<f64>(ElementKind::Pentatope, 21).is_err());
    }

    #[test]
    fn duffy_points_inside() {
        for kind in ElementKind::ALL {
            let (p, w) = duffy_nodes::<f64>(kind, 5).unwrap();
            assert!(w.iter().all(|&x| x > 0.0));
            assert!(p.iter().all(|q| contains(ReferenceFrame::reference(kind), q, 1e-12)));
        }
    }

    #[test]
    fn tesseract_tensor_degree() {
        let (p, w) = duffy_nodes::<f64>(ElementKind::Tesseract, 2).unwrap();
        assert_eq!(p.len(), 16);
        let q: f64 = p.iter().zip(&w).map(|(x, &wi)| wi * x.iter().map(|v| v.powi(3)).product::<f64>()).sum();
        assert!(q.abs() < 1e-15);
        let q: f64 = p.iter().zip(&w).map(|(x, &wi)| wi * x.iter().map(|v| v.powi(2)).product::<f64>()).sum();
        assert!((q - 16.0 / 81.0).abs() < 1e-14);
    }

    fn all_exponents(max_deg: u32) -> Vec<[u32; 4]> {
        let mut out = Vec::new();
        for r in 0..=max_deg {
            for s in 0..=max_deg - r {
                for t in 0..=max_deg - r - s {
                    for v in 0..=max_deg - r - s - t {
                        out.push([r, s, t, v]);
                    }
                }
            }
        }
        out
    }

    #[test]
    fn reference_integrals_match_duffy() {
        for kind in ElementKind::ALL {
            let (p, w) = duffy_nodes::<Dd>(kind, 8).unwrap();
            for e in all_exponents(12) {
                let exact: Dd = monomial_integral(ReferenceFrame::reference(kind), e).unwrap();
                let q: Dd = p
                    .iter()
                    .zip(&w)
                    .map(|(x, &wi)| wi * (0..4).map(|i| x[i].powi(e[i] as i32)).fold(Dd::ONE, |a, b| a * b))
                    .sum();
                assert!((q - exact).abs().to_f64() < 1e-12, "{kind} {e:?}: {q} vs {exact}");
            }
        }
    }

    #[test]
    fn duffy_pentatope_strength_guarantee() {
        let (p, w) = duffy_nodes::<f64>(ElementKind::Pentatope, 8).unwrap();
        for e in all_exponents(7) {
            let exact: f64 = monomial_integral(ReferenceFrame::reference(ElementKind::Pentatope), e).unwrap();
            let q: f64 =
                p.iter().zip(&w).map(|(x, &wi)| wi * (0..4).map(|i| x[i].powi(e[i] as i32)).product::<f64>()).sum();
            assert!((q - exact).abs() < 1e-12);
        }
    }

    #[test]
    fn tet_prism_unit_convention() {
        // brute force on the unit prism: tetrahedron in u1..u3, extrusion in u4
        let (p, w) = duffy_nodes::<f64>(ElementKind::TetPrism, 6).unwrap();
        let frame = ReferenceFrame::unit(ElementKind::TetPrism);
        for e in [[2, 0, 0, 1], [0, 1, 3, 0], [1, 1, 1, 4]] {
            let q: f64 = p
                .iter()
                .zip(&w)
                .map(|(x, &wi)| {
                    let u = reference_to_unit(x);
                    wi / 16.0 * (0..4).map(|i| u[i].powi(e[i] as i32)).product::<f64>()
                })
                .sum();
            let exact: f64 = monomial_integral(frame, e).unwrap();
            assert!((q - exact).abs() < 1e-15, "{e:?}");
        }
    }
}
