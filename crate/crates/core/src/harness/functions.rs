//! The transcendental test functions and their integrals over `[0, 1]^4`.
//!
//! Each argument is a sum of one-variable terms, so the integrals factor:
//! `f1` is a product of real 1D integrals, and `f2`, `f3` are imaginary parts
//! of products of complex 1D integrals `int_0^1 exp(i a x^k) dx`.

use std::fmt;
use std::str::FromStr;

use crate::elements::Point4;
use crate::error::Error;
use crate::jacobi::gauss_legendre;
use crate::real::{Dd, Real};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TestFunction {
    /// `exp(x^2 + 2y^3 + 3z^4 + 4t^5)`
    F1,
    /// `sin(x^2 + 2y^3 + 3z^4 + 4t^5)`
    F2,
    /// `sin(x^2 + y^2 + z^2 + t^2)`
    F3,
}

impl TestFunction {
    pub const ALL: [TestFunction; 3] = [TestFunction::F1, TestFunction::F2, TestFunction::F3];

    // (coefficient, power) per variable
    fn terms(self) -> [(f64, i32); 4] {
        match self {
            TestFunction::F1 | TestFunction::F2 => [(1.0, 2), (2.0, 3), (3.0, 4), (4.0, 5)],
            TestFunction::F3 => [(1.0, 2); 4],
        }
    }

    pub fn eval<T: Real>(self, x: &Point4<T>) -> T {
        let arg: T = self.terms().iter().zip(x).map(|(&(a, k), &xi)| T::from_f64(a) * xi.powi(k)).sum();
        match self {
            TestFunction::F1 => arg.exp(),
            TestFunction::F2 | TestFunction::F3 => arg.sin(),
        }
    }

    /// Integral over `[0, 1]^4` in double-double.
    pub fn exact_integral(self) -> Dd {
        match self {
            TestFunction::F1 => self
                .terms()
                .iter()
                .fold(Dd::one(), |acc, &(a, k)| acc * integrate_01(|x| (Dd::from_f64(a) * x.powi(k)).exp())),
            TestFunction::F2 | TestFunction::F3 => {
                let mut acc = Complex { re: Dd::one(), im: Dd::zero() };
                for &(a, k) in &self.terms() {
                    let a = Dd::from_f64(a);
                    let re = integrate_01(|x| (a * x.powi(k)).cos());
                    let im = integrate_01(|x| (a * x.powi(k)).sin());
                    acc = acc.mul(Complex { re, im });
                }
                acc.im
            }
        }
    }
}

impl fmt::Display for TestFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TestFunction::F1 => "f1",
            TestFunction::F2 => "f2",
            TestFunction::F3 => "f3",
        })
    }
}

impl FromStr for TestFunction {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "f1" => Ok(TestFunction::F1),
            "f2" => Ok(TestFunction::F2),
            "f3" => Ok(TestFunction::F3),
            _ => Err(Error::Parameter(format!("unknown test function '{s}' (expected f1, f2 or f3)"))),
        }
    }
}

#[derive(Clone, Copy)]
struct Complex {
    re: Dd,
    im: Dd,
}

impl Complex {
    fn mul(self, o: Complex) -> Complex {
        Complex { re: self.re * o.re - self.im * o.im, im: self.re * o.im + self.im * o.re }
    }
}

const PANELS: usize = 32;
const PANEL_POINTS: usize = 24;

/// Composite Gauss-Legendre on `[0, 1]`.
fn integrate_01(f: impl Fn(Dd) -> Dd) -> Dd {
    let g = gauss_legendre::<Dd>(PANEL_POINTS).expect("supported point count");
    let h = Dd::one() / Dd::from_usize(PANELS);
    let half = h * Dd::from_f64(0.5);
    let mut parts = Vec::with_capacity(PANELS);
    for p in 0..PANELS {
        let mid = h * Dd::from_usize(p) + half;
        parts.push(g.nodes.iter().zip(&g.weights).map(|(&t, &w)| w * f(mid + half * t)).sum::<Dd>() * half);
    }
    crate::par::tree_sum(&parts)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_dimensional_integrals() {
        let v = integrate_01(|x| (x * x).exp());
        assert!((v - "1.462651745907181608804048586857".parse::<Dd>().unwrap()).abs().to_f64() < 1e-28);
        let s = integrate_01(|x| (x * x).sin());
        assert!((s - "0.3102683017233811018081524231654".parse::<Dd>().unwrap()).abs().to_f64() < 1e-28);
    }

    #[test]
    fn integrals_match_arbitrary_precision_values() {
        // 40-digit adaptive quadrature values
        let expect = [
            "34.60633808875595256478986769307828",
            "0.4104949988512827755216606231419225",
            "0.8103884703464141536417680253761571",
        ];
        for (f, e) in TestFunction::ALL.iter().zip(expect) {
            let e: Dd = e.parse().unwrap();
            assert!(((f.exact_integral() - e) / e).abs().to_f64() < 1e-28, "{f}");
        }
    }

    #[test]
    fn separable_values_agree_with_brute_force() {
        let g = gauss_legendre::<f64>(24).unwrap();
        for f in TestFunction::ALL {
            // 2^4 subcubes, 24^4 points each
            let mut total = 0.0;
            for cell in 0..16 {
                let o: [f64; 4] = std::array::from_fn(|i| ((cell >> i) & 1) as f64 * 0.5);
                for (a, wa) in g.nodes.iter().zip(&g.weights) {
                    for (b, wb) in g.nodes.iter().zip(&g.weights) {
                        for (c, wc) in g.nodes.iter().zip(&g.weights) {
                            for (d, wd) in g.nodes.iter().zip(&g.weights) {
                                let x = [
                                    o[0] + (a + 1.0) / 4.0,
                                    o[1] + (b + 1.0) / 4.0,
                                    o[2] + (c + 1.0) / 4.0,
                                    o[3] + (d + 1.0) / 4.0,
                                ];
                                total += wa * wb * wc * wd * f.eval(&x) / 256.0;
                            }
                        }
                    }
                }
            }
            let exact = f.exact_integral().to_f64();
            assert!((total - exact).abs() < 1e-12 * exact.abs(), "{f}: {total} vs {exact}");
        }
    }
}
