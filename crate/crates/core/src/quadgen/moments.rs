//! Symmetry-reduced moment equations.
//!
//! A fully symmetric rule integrates `psi` exactly iff it integrates the
//! group average of `psi` exactly, so only a basis of the averaged functions
//! is needed. Representatives are picked greedily in basis order: an index is
//! kept when its averaged function is not (numerically) in the span of the
//! averages already kept.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::basis::{basis_set, eval_all, BasisSet, MultiIndex, MAX_BASIS_DEGREE};
use crate::elements::{volume_real, ElementKind, Point4, ReferenceFrame};
use crate::error::{param_err, Result};
use crate::real::{Dd, Real};
use crate::symmetry::{group_images, orbit_families, sample_params, seed_point};

#[derive(Debug, Clone)]
pub struct MomentSystem {
    pub kind: ElementKind,
    pub strength: usize,
    pub basis_indices: Vec<MultiIndex>,
    /// `sqrt(volume)` for the constant function, zero elsewhere.
    pub rhs: Vec<Dd>,
    set: BasisSet,
}

// averaged functions with RMS below this are identically zero
const ZERO_AVERAGE: f64 = 1e-10;
const DEPENDENT: f64 = 1e-7;

impl MomentSystem {
    /// Cached per `(kind, strength)`.
    pub fn get(kind: ElementKind, strength: usize) -> Result<Arc<MomentSystem>> {
        static CACHE: OnceLock<Mutex<HashMap<(ElementKind, usize), Arc<MomentSystem>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(Default::default);
        if let Some(s) = cache.lock().unwrap().get(&(kind, strength)) {
            return Ok(s.clone());
        }
        let sys = Arc::new(Self::build(kind, strength)?);
        cache.lock().unwrap().insert((kind, strength), sys.clone());
        Ok(sys)
    }

    fn build(kind: ElementKind, strength: usize) -> Result<Self> {
        if strength > MAX_BASIS_DEGREE {
            return Err(param_err!("strength {strength} above the supported maximum {MAX_BASIS_DEGREE}"));
        }
        let all = total_degree_set(kind, strength)?;
        let n = all.indices.len();
        let n_samples = n + 16;
        let generic = *orbit_families(kind).last().expect("every element has orbit families");
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0f_5ca1e);
        let mut columns = vec![vec![0.0f64; n_samples]; n];
        let g = crate::symmetry::group_order(kind) as f64;
        for m in 0..n_samples {
            let y: Point4 = seed_point(&generic, &sample_params(&generic, &mut rng))?;
            let mut acc = vec![0.0; n];
            for img in group_images(kind, &y) {
                for (a, v) in acc.iter_mut().zip(eval_all(&all, &img)) {
                    *a += v;
                }
            }
            for (k, a) in acc.into_iter().enumerate() {
                columns[k][m] = a / g;
            }
        }

        let norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
        let rms_scale = (n_samples as f64).sqrt();
        let mut kept: Vec<Vec<f64>> = Vec::new();
        let mut indices = Vec::new();
        for (k, col) in columns.into_iter().enumerate() {
            let n0 = norm(&col);
            if n0 / rms_scale < ZERO_AVERAGE {
                continue;
            }
            let mut r = col;
            // two passes of modified Gram-Schmidt
            for _ in 0..2 {
                for q in &kept {
                    let d: f64 = q.iter().zip(&r).map(|(a, b)| a * b).sum();
                    for (ri, qi) in r.iter_mut().zip(q) {
                        *ri -= d * qi;
                    }
                }
            }
            let nr = norm(&r);
            if nr > DEPENDENT * n0 {
                kept.push(r.into_iter().map(|x| x / nr).collect());
                indices.push(all.indices[k]);
            }
        }
        let sqrt_vol = volume_real::<Dd>(ReferenceFrame::reference(kind)).sqrt();
        let rhs = indices.iter().map(|m: &MultiIndex| if m.total() == 0 { sqrt_vol } else { Dd::zero() }).collect();
        let set = BasisSet { kind, degree: strength, indices: indices.clone() };
        Ok(MomentSystem { kind, strength, basis_indices: indices, rhs, set })
    }

    pub fn n_equations(&self) -> usize {
        self.basis_indices.len()
    }

    /// `sum_x psi_rep(x)` over the given points, one entry per representative.
    pub fn orbit_sums<T: Real>(&self, points: &[Point4<T>]) -> Vec<T> {
        let mut acc = vec![T::zero(); self.n_equations()];
        for x in points {
            for (a, v) in acc.iter_mut().zip(eval_all(&self.set, x)) {
                *a += v;
            }
        }
        acc
    }

    pub fn rhs_as<T: Real>(&self) -> Vec<T> {
        self.rhs.iter().map(|&v| T::from_dd(v)).collect()
    }
}

/// Basis functions of total degree at most `p` (for the tesseract this is a
/// subset of the tensor basis).
pub fn total_degree_set(kind: ElementKind, p: usize) -> Result<BasisSet> {
    let mut set = basis_set(kind, p)?;
    set.indices.retain(|m| m.total() <= p);
    Ok(set)
}

/// Dimension of the invariant polynomials of degree at most `p`, counted from
/// the generating invariants (centred power sums of the barycentric
/// coordinates, squares of coordinates, ...). Independent of [`MomentSystem`].
pub fn invariant_count(kind: ElementKind, p: usize) -> usize {
    let degrees: &[usize] = match kind {
        // power sums of x_i^2
        ElementKind::Tesseract => &[2, 4, 6, 8],
        // p2, p3, p4 of the tet coordinates and x4^2
        ElementKind::TetPrism => &[2, 3, 4, 2],
        ElementKind::Pentatope => &[2, 3, 4, 5],
    };
    // number of monomials in the generators with weighted degree <= p
    let mut ways = vec![0usize; p + 1];
    ways[0] = 1;
    for &d in degrees {
        for n in d..=p {
            ways[n] += ways[n - d];
        }
    }
    ways.iter().sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn representative_counts_match_invariant_theory() {
        for kind in ElementKind::ALL {
            for p in 0..=8 {
                let sys = MomentSystem::get(kind, p).unwrap();
                assert_eq!(sys.n_equations(), invariant_count(kind, p), "{kind} p={p}");
            }
        }
    }

    #[test]
    fn tesseract_representatives_are_even() {
        let sys = MomentSystem::get(ElementKind::Tesseract, 7).unwrap();
        assert_eq!(sys.n_equations(), 7);
        for m in &sys.basis_indices {
            assert!(m.as_array().iter().all(|v| v % 2 == 0), "{m:?}");
        }
    }

    #[test]
    fn rhs_pattern() {
        let sys = MomentSystem::get(ElementKind::Pentatope, 4).unwrap();
        assert_eq!(sys.basis_indices[0], MultiIndex::new(0, 0, 0, 0));
        assert!((sys.rhs[0].to_f64() - (2.0f64 / 3.0).sqrt()).abs() < 1e-15);
        assert!(sys.rhs[1..].iter().all(|v| v.to_f64() == 0.0));
    }
}
