//! Numerical experiments: single-element polynomial exactness and
//! convergence on triangulated grids of `[0, 1]^4`.

mod functions;
mod grid;

pub use functions::TestFunction;
pub use grid::{grid_integrate, kuhn_freudenthal, Cell, Grid4, MAX_SUBDIVISIONS};

use std::io::Write;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::elements::{monomial_integral, reference_to_unit, ElementKind, Point4, ReferenceFrame};
use crate::error::Result;
use crate::par::Execution;
use crate::real::{Dd, Real};
use crate::rules::QuadratureRule;

/// `sum c_e x^e` over exponents `e` of total degree at most `degree`, with
/// standard-normal coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct RandomPolynomial {
    pub degree: usize,
    pub terms: Vec<([u32; 4], f64)>,
}

/// splitmix64 step.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed for the polynomial of `(kind, p)` under a global seed.
pub fn polynomial_seed(kind: ElementKind, p: usize, seed: u64) -> u64 {
    let k = ElementKind::ALL.iter().position(|&x| x == kind).unwrap() as u64;
    mix(mix(mix(seed) ^ k) ^ p as u64)
}

fn exponents(degree: usize) -> impl Iterator<Item = [u32; 4]> {
    (0..=degree).flat_map(move |total| {
        (0..=total).rev().flat_map(move |r| {
            (0..=total - r).rev().flat_map(move |s| {
                (0..=total - r - s).rev().map(move |t| [r as u32, s as u32, t as u32, (total - r - s - t) as u32])
            })
        })
    })
}

impl RandomPolynomial {
    pub fn new(degree: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let terms = exponents(degree).map(|e| (e, StandardNormal.sample(&mut rng))).collect();
        RandomPolynomial { degree, terms }
    }

    /// Only odd-degree terms, so `f(-x) = -f(x)`.
    pub fn odd(degree: usize, seed: u64) -> Self {
        let mut p = Self::new(degree, seed);
        p.terms.retain(|(e, _)| e.iter().sum::<u32>() % 2 == 1);
        p
    }

    pub fn eval<T: Real>(&self, x: &Point4<T>) -> T {
        let pw: [Vec<T>; 4] = std::array::from_fn(|a| {
            let mut v = vec![T::one(); self.degree + 1];
            for e in 1..=self.degree {
                v[e] = v[e - 1] * x[a];
            }
            v
        });
        self.terms
            .iter()
            .map(|&(e, c)| {
                T::from_f64(c)
                    * pw[0][e[0] as usize]
                    * pw[1][e[1] as usize]
                    * pw[2][e[2] as usize]
                    * pw[3][e[3] as usize]
            })
            .sum()
    }

    /// Exact integral over an element.
    pub fn integral<T: Real>(&self, frame: ReferenceFrame) -> Result<T> {
        let mut acc = T::zero();
        for &(e, c) in &self.terms {
            acc += T::from_f64(c) * monomial_integral::<T>(frame, e)?;
        }
        Ok(acc)
    }
}

/// Applies a reference-element rule on the unit element.
pub fn integrate_on_unit<T: Real>(rule: &QuadratureRule, f: impl Fn(&Point4<T>) -> T) -> T {
    let (pts, wts) = rule.nodes::<T>();
    let s = T::one() / T::from_f64(16.0);
    let terms: Vec<T> = pts.iter().zip(&wts).map(|(x, &w)| w * s * f(&reference_to_unit(x))).collect();
    crate::par::tree_sum(&terms)
}

pub fn percent_error<T: Real>(j: T, j_inf: T) -> f64 {
    ((j - j_inf) / j_inf).abs().to_f64() * 100.0
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExactnessRow {
    pub kind: ElementKind,
    pub strength: usize,
    pub p: usize,
    pub j: f64,
    pub j_inf: f64,
    pub percent_error: f64,
}

/// Percent error of each rule on seeded random polynomials of order
/// `0..=p_max`, on the unit element, with arithmetic in `T`.
pub fn exactness_experiment<T: Real>(rules: &[&QuadratureRule], p_max: usize, seed: u64) -> Result<Vec<ExactnessRow>> {
    let mut rows = Vec::new();
    for rule in rules {
        let frame = ReferenceFrame::unit(rule.kind);
        for p in 0..=p_max {
            let poly = RandomPolynomial::new(p, polynomial_seed(rule.kind, p, seed));
            // the reference value cancels badly in f64 at higher orders
            let j_inf: Dd = poly.integral(frame)?;
            let j: T = integrate_on_unit(rule, |x| poly.eval(x));
            rows.push(ExactnessRow {
                kind: rule.kind,
                strength: rule.strength,
                p,
                j: j.to_f64(),
                j_inf: j_inf.to_f64(),
                percent_error: percent_error(j.to_dd(), j_inf),
            });
        }
    }
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergencePoint {
    pub m: usize,
    pub h: f64,
    pub j: Dd,
    pub percent_error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceSeries {
    pub kind: ElementKind,
    pub strength: usize,
    pub function: TestFunction,
    pub j_inf: Dd,
    pub points: Vec<ConvergencePoint>,
    /// Least-squares slope of `log(error)` against `log(h)` over the finest
    /// half of the series; absent when errors sit at the rounding floor.
    pub slope: Option<f64>,
}

/// Percent errors below this are treated as rounding noise.
pub const ERROR_FLOOR: f64 = 1e-24;

/// Log-log slope over the finest half (at least two points).
pub fn fit_slope(points: &[(f64, f64)]) -> Option<f64> {
    let mut pts: Vec<(f64, f64)> = points.iter().copied().filter(|&(_, e)| e > ERROR_FLOOR).collect();
    pts.sort_by(|a, b| b.0.total_cmp(&a.0));
    if pts.len() < 2 {
        return None;
    }
    let k = (pts.len() / 2).max(2);
    let tail = &pts[pts.len() - k..];
    let n = tail.len() as f64;
    let (sx, sy) = tail.iter().fold((0.0, 0.0), |(a, b), &(h, e)| (a + h.ln(), b + e.ln()));
    let (mx, my) = (sx / n, sy / n);
    let (mut num, mut den) = (0.0, 0.0);
    for &(h, e) in tail {
        num += (h.ln() - mx) * (e.ln() - my);
        den += (h.ln() - mx).powi(2);
    }
    Some(num / den)
}

/// Integrates `function` on grids with `m in m_list`, in double-double.
pub fn convergence_experiment(
    rule: &QuadratureRule,
    function: TestFunction,
    m_list: &[usize],
    exec: Execution,
) -> Result<ConvergenceSeries> {
    let j_inf = function.exact_integral();
    let mut points = Vec::new();
    for &m in m_list {
        let grid = kuhn_freudenthal(rule.kind, m)?;
        let j: Dd = grid_integrate(&grid, rule, |x| function.eval(x), exec)?;
        points.push(ConvergencePoint { m, h: grid.h(), j, percent_error: percent_error(j, j_inf) });
    }
    let slope = fit_slope(&points.iter().map(|p| (p.h, p.percent_error)).collect::<Vec<_>>());
    Ok(ConvergenceSeries { kind: rule.kind, strength: rule.strength, function, j_inf, points, slope })
}

pub const CSV_HEADER: &str = "element,strength,p_or_m,h,J,J_inf,percent_error";

pub fn write_exactness_csv(rows: &[ExactnessRow], mut out: impl Write) -> Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in rows {
        writeln!(out, "{},{},{},,{:e},{:e},{:e}", r.kind, r.strength, r.p, r.j, r.j_inf, r.percent_error)?;
    }
    Ok(())
}

pub fn write_convergence_csv(series: &[ConvergenceSeries], mut out: impl Write) -> Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for s in series {
        for p in &s.points {
            writeln!(
                out,
                "{},{},{},{:e},{:e},{:e},{:e}",
                s.kind,
                s.strength,
                p.m,
                p.h,
                p.j.to_f64(),
                s.j_inf.to_f64(),
                p.percent_error
            )?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elements::duffy_rule;
    use crate::rules::bundled_rules;

    #[test]
    fn polynomial_term_count_and_determinism() {
        let p = RandomPolynomial::new(3, 42);
        assert_eq!(p.terms.len(), 35);
        assert_eq!(p, RandomPolynomial::new(3, 42));
        assert_ne!(p, RandomPolynomial::new(3, 43));
        assert_ne!(polynomial_seed(ElementKind::Tesseract, 3, 1), polynomial_seed(ElementKind::Pentatope, 3, 1));
        assert!(RandomPolynomial::odd(4, 1).terms.iter().all(|(e, _)| e.iter().sum::<u32>() % 2 == 1));
    }

    #[test]
    fn table_rule_exact_to_nine() {
        let cat = bundled_rules();
        let rule = cat.get(ElementKind::Pentatope, 9).unwrap();
        let rows = exactness_experiment::<f64>(&[rule], 10, 3).unwrap();
        // small integrals cancel in f64, so bound relative to max(|J|, 1)
        for r in &rows[..10] {
            assert!((r.j - r.j_inf).abs() <= 1e-14 * r.j_inf.abs().max(1.0), "{r:?}");
        }
        assert!(rows[10].percent_error > 1e-6);
        let rows = exactness_experiment::<Dd>(&[rule], 9, 3).unwrap();
        assert!(rows.iter().all(|r| r.percent_error <= 1e-26), "{rows:?}");
    }

    #[test]
    fn constant_polynomial_exact_for_duffy() {
        for kind in ElementKind::ALL {
            let rule = duffy_rule(kind, 1).unwrap();
            let rows = exactness_experiment::<f64>(&[&rule], 0, 9).unwrap();
            assert!(rows[0].percent_error < 1e-13);
        }
    }

    #[test]
    fn polynomial_exact_on_grid() {
        let rule = duffy_rule(ElementKind::Pentatope, 4).unwrap();
        let poly = RandomPolynomial::new(6, 5);
        let exact: f64 = poly.integral(ReferenceFrame::unit(ElementKind::Tesseract)).unwrap();
        let g = kuhn_freudenthal(ElementKind::Pentatope, 2).unwrap();
        let v = grid_integrate::<f64>(&g, &rule, |x| poly.eval(x), Execution::default()).unwrap();
        assert!((v - exact).abs() < 1e-12 * exact.abs().max(1.0));
    }

    #[test]
    fn slope_fit() {
        let pts: Vec<(f64, f64)> = (1..=6).map(|m| (1.0 / m as f64, 3.0 * (1.0 / m as f64).powi(7))).collect();
        assert!((fit_slope(&pts).unwrap() - 7.0).abs() < 1e-10);
        assert_eq!(fit_slope(&[(1.0, 1e-30), (0.5, 1e-31)]), None);
    }

    #[test]
    fn csv_shape() {
        let rule = duffy_rule(ElementKind::Tesseract, 2).unwrap();
        let rows = exactness_experiment::<f64>(&[&rule], 2, 1).unwrap();
        let mut buf = Vec::new();
        write_exactness_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().next().unwrap(), CSV_HEADER);
        assert_eq!(text.lines().count(), 4);
        assert!(text.lines().all(|l| l.split(',').count() == 7));
    }
}
