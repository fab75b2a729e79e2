//! Monomial-by-monomial verification of a rule.

use crate::elements::{contains, monomial_integral_exact, ElementKind, ReferenceFrame};
use crate::real::{rational_to_dd, Dd, Real};
use crate::rules::QuadratureRule;

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub kind: ElementKind,
    pub strength: usize,
    /// Largest `|Q - I| / max(1, |I|)` over monomials of degree <= strength.
    pub max_error: f64,
    /// Exponents of the worst monomial when the error exceeds `tolerance`.
    pub failing_monomial: Option<[u32; 4]>,
    pub weights_positive: bool,
    pub points_inside: bool,
    pub tolerance: f64,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.failing_monomial.is_none() && self.weights_positive && self.points_inside
    }
}

/// Verification in double precision (tolerance `1e-12`).
pub fn verify_rule(rule: &QuadratureRule, strength: usize) -> VerifyReport {
    verify_rule_with::<f64>(rule, strength, 1e-12)
}

/// Verification with arithmetic in `T`.
pub fn verify_rule_with<T: Real>(rule: &QuadratureRule, strength: usize, tolerance: f64) -> VerifyReport {
    let kind = rule.kind;
    let frame = ReferenceFrame::reference(kind);
    let (pts, wts) = rule.nodes::<T>();
    let s = strength;
    // powers[i][axis][e] = x_axis^e at point i
    let powers: Vec<[Vec<T>; 4]> = pts
        .iter()
        .map(|p| {
            std::array::from_fn(|a| {
                let mut v = vec![T::one(); s + 1];
                for e in 1..=s {
                    v[e] = v[e - 1] * p[a];
                }
                v
            })
        })
        .collect();
    let mut max_error = 0.0f64;
    let mut worst = [0u32; 4];
    for total in 0..=s {
        for r in 0..=total {
            for t1 in 0..=total - r {
                for t2 in 0..=total - r - t1 {
                    let v = total - r - t1 - t2;
                    let e = [r as u32, t1 as u32, t2 as u32, v as u32];
                    let q: T =
                        powers.iter().zip(&wts).map(|(pw, &w)| w * pw[0][r] * pw[1][t1] * pw[2][t2] * pw[3][v]).sum();
                    let exact: Dd = rational_to_dd(&monomial_integral_exact(frame, e).expect("degree in range"));
                    let err = (q.to_dd() - exact).abs().to_f64() / exact.abs().to_f64().max(1.0);
                    if !(err <= max_error) {
                        max_error = if err.is_nan() { f64::INFINITY } else { err };
                        worst = e;
                    }
                }
            }
        }
    }
    let weights_positive = rule.weights().iter().all(|w| w.to_f64() > 0.0);
    let points_inside = rule.points().iter().all(|p| contains(frame, &p.map(|v| v.to_f64()), 1e-12));
    VerifyReport {
        kind,
        strength,
        max_error,
        failing_monomial: (max_error > tolerance).then_some(worst),
        weights_positive,
        points_inside,
        tolerance,
    }
}
