//! Symmetry orbits of the three elements.
//!
//! Tesseract orbits are given by coordinate magnitudes in `[0, 1]`; the group
//! is the hyperoctahedral group (4! permutations times 2^4 sign flips) acting
//! on `[-1, 1]^4`. Tet-prism and pentatope orbits are given in barycentric
//! form; the groups permute the barycentric coordinates (and, for the prism,
//! reflect `x4`).

use crate::elements::{bary_to_cart, Barycentric, ElementKind, Point4};
use crate::error::{param_err, Error, Result};
use crate::real::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OrbitFamily {
    pub kind: ElementKind,
    /// 1-based, in the published order `S_1, S_2, ...`.
    pub family_id: usize,
    pub n_params: usize,
    pub cardinality: usize,
}

const TESSERACT: [(usize, usize); 12] =
    [(0, 1), (1, 8), (1, 24), (2, 48), (1, 32), (2, 96), (3, 192), (1, 16), (2, 64), (2, 96), (3, 192), (4, 384)];
const TET_PRISM: [(usize, usize); 10] =
    [(0, 1), (1, 2), (1, 4), (2, 8), (1, 6), (2, 12), (2, 12), (3, 24), (3, 24), (4, 48)];
const PENTATOPE: [(usize, usize); 7] = [(0, 1), (1, 5), (1, 10), (2, 20), (2, 30), (3, 60), (4, 120)];

fn table(kind: ElementKind) -> &'static [(usize, usize)] {
    match kind {
        ElementKind::Tesseract => &TESSERACT,
        ElementKind::TetPrism => &TET_PRISM,
        ElementKind::Pentatope => &PENTATOPE,
    }
}

pub fn orbit_families(kind: ElementKind) -> Vec<OrbitFamily> {
    table(kind)
        .iter()
        .enumerate()
        .map(|(i, &(n_params, cardinality))| OrbitFamily { kind, family_id: i + 1, n_params, cardinality })
        .collect()
}

pub fn family(kind: ElementKind, family_id: usize) -> Result<OrbitFamily> {
    orbit_families(kind)
        .get(family_id.wrapping_sub(1))
        .copied()
        .ok_or_else(|| param_err!("{kind} has no orbit family S{family_id}"))
}

/// Order of the symmetry group.
pub fn group_order(kind: ElementKind) -> usize {
    match kind {
        ElementKind::Tesseract => 384,
        ElementKind::TetPrism => 48,
        ElementKind::Pentatope => 120,
    }
}

/// Number of points sharing one weight.
pub fn orbit_weight_multiplicity(family: &OrbitFamily) -> usize {
    family.cardinality
}

/// Sequential box for each parameter: `(lower, upper)` given the values of
/// the preceding parameters. Every point of the box yields barycentric
/// coordinates in `[0, 1]`.
pub fn param_bounds(family: &OrbitFamily, prev: &[f64]) -> (f64, f64) {
    use ElementKind::*;
    let k = prev.len();
    let sum: f64 = prev.iter().sum();
    let hi = match (family.kind, family.family_id, k) {
        (Tesseract, _, _) => 1.0,
        // delta, always last
        (TetPrism, 2 | 4 | 6 | 8 | 10, _) if k == family.n_params - 1 => 1.0,
        (TetPrism, 3 | 4, 0) => 1.0 / 3.0,
        (TetPrism, 5 | 6, 0) => 0.5,
        (TetPrism, 7 | 8, 0) => 0.5,
        (TetPrism, 7 | 8, 1) => 1.0 - 2.0 * prev[0],
        (TetPrism, 9 | 10, _) => 1.0 - sum,
        (Pentatope, 2, 0) => 0.25,
        (Pentatope, 3, 0) => 1.0 / 3.0,
        (Pentatope, 4, 0) => 1.0 / 3.0,
        (Pentatope, 4, 1) => 1.0 - 3.0 * prev[0],
        (Pentatope, 5, 0) => 0.5,
        (Pentatope, 5, 1) => 0.5 - prev[0],
        (Pentatope, 6, 0) => 0.5,
        (Pentatope, 6, _) => 1.0 - prev[0] - sum,
        (Pentatope, 7, _) => 1.0 - sum,
        _ => unreachable!("no parameter {k} for {:?}", family),
    };
    (0.0, hi.max(0.0))
}

/// Projects parameters onto the admissible box (sequentially).
pub fn clamp_params<T: Real>(family: &OrbitFamily, params: &[T]) -> Vec<T> {
    let mut out: Vec<T> = Vec::with_capacity(params.len());
    let mut prev_f: Vec<f64> = Vec::with_capacity(params.len());
    for &p in params {
        let (lo, hi) = param_bounds(family, &prev_f);
        let v = if p.to_f64() < lo {
            T::from_f64(lo)
        } else if p.to_f64() > hi {
            // recompute the bound in T so that derived coordinates stay >= 0
            upper_bound_exact(family, &out).min(T::from_f64(hi).max(T::zero()))
        } else if !p.is_finite() {
            T::from_f64(lo)
        } else {
            p
        };
        prev_f.push(v.to_f64());
        out.push(v);
    }
    out
}

fn upper_bound_exact<T: Real>(family: &OrbitFamily, prev: &[T]) -> T {
    use ElementKind::*;
    let k = prev.len();
    let sum: T = prev.iter().copied().sum();
    let one = T::one();
    let v = match (family.kind, family.family_id, k) {
        (TetPrism, 7 | 8, 1) => one - T::from_f64(2.0) * prev[0],
        (TetPrism, 9 | 10, _) if k < 3 => one - sum,
        (Pentatope, 4, 1) => one - T::from_f64(3.0) * prev[0],
        (Pentatope, 5, 1) => T::from_f64(0.5) - prev[0],
        (Pentatope, 6, 1 | 2) => one - prev[0] - sum,
        (Pentatope, 7, _) => one - sum,
        _ => return T::from_f64(param_bounds(family, &prev.iter().map(|v| v.to_f64()).collect::<Vec<_>>()).1),
    };
    v.max(T::zero())
}

/// Uniform draw from the sequential box.
pub fn sample_params<R: rand::Rng + ?Sized>(family: &OrbitFamily, rng: &mut R) -> Vec<f64> {
    let mut out = Vec::with_capacity(family.n_params);
    for _ in 0..family.n_params {
        let (lo, hi) = param_bounds(family, &out);
        out.push(lo + (hi - lo) * rng.gen::<f64>());
    }
    out
}

/// True iff the parameters lie in the admissible box within `tol`.
pub fn in_box<T: Real>(family: &OrbitFamily, params: &[T], tol: f64) -> bool {
    if params.len() != family.n_params {
        return false;
    }
    let mut prev = Vec::new();
    for p in params {
        let (lo, hi) = param_bounds(family, &prev);
        let v = p.to_f64();
        if !(v >= lo - tol && v <= hi + tol) {
            return false;
        }
        prev.push(v);
    }
    true
}

/// Seed of an orbit before the group acts.
#[derive(Debug, Clone, PartialEq)]
pub enum Seed<T> {
    /// Coordinate magnitudes in `[0, 1]`.
    Cube([T; 4]),
    /// Barycentric coordinates (4 or 5) and the prism extrusion coordinate.
    Bary(Vec<T>, T),
}

pub fn seed<T: Real>(family: &OrbitFamily, p: &[T]) -> Result<Seed<T>> {
    if p.len() != family.n_params {
        return Err(param_err!(
            "S{} of the {} takes {} parameters, got {}",
            family.family_id,
            family.kind,
            family.n_params,
            p.len()
        ));
    }
    let z = T::zero();
    let one = T::one();
    let half = T::from_f64(0.5);
    let two = T::from_f64(2.0);
    let three = T::from_f64(3.0);
    Ok(match family.kind {
        ElementKind::Tesseract => Seed::Cube(match family.family_id {
            1 => [z, z, z, z],
            2 => [p[0], z, z, z],
            3 => [p[0], p[0], z, z],
            4 => [p[0], p[1], z, z],
            5 => [p[0], p[0], p[0], z],
            6 => [p[0], p[0], p[1], z],
            7 => [p[0], p[1], p[2], z],
            8 => [p[0], p[0], p[0], p[0]],
            9 => [p[0], p[0], p[0], p[1]],
            10 => [p[0], p[0], p[1], p[1]],
            11 => [p[0], p[0], p[1], p[2]],
            _ => [p[0], p[1], p[2], p[3]],
        }),
        ElementKind::TetPrism => {
            let q = T::from_f64(0.25);
            let delta = if family.family_id % 2 == 0 { p[family.n_params - 1] } else { z };
            let l = match family.family_id {
                1 | 2 => vec![q, q, q, q],
                3 | 4 => vec![p[0], p[0], p[0], one - three * p[0]],
                5 | 6 => vec![p[0], p[0], half - p[0], half - p[0]],
                7 | 8 => vec![p[0], p[0], p[1], one - two * p[0] - p[1]],
                _ => vec![p[0], p[1], p[2], one - p[0] - p[1] - p[2]],
            };
            Seed::Bary(l, delta)
        }
        ElementKind::Pentatope => {
            let l = match family.family_id {
                1 => vec![T::ratio(1, 5); 5],
                2 => vec![p[0], p[0], p[0], p[0], one - T::from_f64(4.0) * p[0]],
                3 => {
                    let r = half - T::from_f64(1.5) * p[0];
                    vec![p[0], p[0], p[0], r, r]
                }
                4 => vec![p[0], p[0], p[0], p[1], one - three * p[0] - p[1]],
                5 => vec![p[0], p[0], p[1], p[1], one - two * p[0] - two * p[1]],
                6 => vec![p[0], p[0], p[1], p[2], one - two * p[0] - p[1] - p[2]],
                _ => vec![p[0], p[1], p[2], p[3], one - p[0] - p[1] - p[2] - p[3]],
            };
            Seed::Bary(l, z)
        }
    })
}

/// Cartesian seed point (one representative of the orbit).
pub fn seed_point<T: Real>(family: &OrbitFamily, params: &[T]) -> Result<Point4<T>> {
    match seed(family, params)? {
        Seed::Cube(c) => Ok(c),
        Seed::Bary(l, x4) => bary_to_cart(family.kind, &Barycentric { lambdas: l, x4 }),
    }
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn rec(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                prefix.push(i);
                rec(prefix, used, out);
                prefix.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

/// Applies every group element to a Cartesian point, in a fixed order.
pub fn group_images<T: Real>(kind: ElementKind, x: &Point4<T>) -> Vec<Point4<T>> {
    match kind {
        ElementKind::Tesseract => {
            let mut out = Vec::with_capacity(384);
            for perm in permutations(4) {
                for signs in 0..16 {
                    out.push(std::array::from_fn(|i| {
                        let v = x[perm[i]];
                        if (signs >> i) & 1 == 1 {
                            -v
                        } else {
                            v
                        }
                    }));
                }
            }
            out
        }
        ElementKind::TetPrism | ElementKind::Pentatope => {
            let n = if kind == ElementKind::Pentatope { 5 } else { 4 };
            let l = cart_to_bary(kind, x);
            let mut out = Vec::new();
            for perm in permutations(n) {
                let lp: Vec<T> = perm.iter().map(|&i| l[i]).collect();
                let reflections: &[bool] = if kind == ElementKind::TetPrism { &[false, true] } else { &[false] };
                for &flip in reflections {
                    let x4 = if flip { -x[3] } else { x[3] };
                    out.push(bary_to_cart(kind, &Barycentric { lambdas: lp.clone(), x4 }).expect("sizes match"));
                }
            }
            out
        }
    }
}

/// Inverse of the barycentric map (`lambda_{k+1} = (1 + x_k)/2`).
pub fn cart_to_bary<T: Real>(kind: ElementKind, x: &Point4<T>) -> Vec<T> {
    let half = T::from_f64(0.5);
    let rows = if kind == ElementKind::Pentatope { 4 } else { 3 };
    let tail: Vec<T> = (0..rows).map(|k| (T::one() + x[k]) * half).collect();
    let first = T::one() - tail.iter().copied().sum::<T>();
    std::iter::once(first).chain(tail).collect()
}

const SAME_POINT: f64 = 1e-14;

/// Distinct points of a list (coordinates within 1e-14 are the same point),
/// first occurrence kept.
pub fn dedup_points<T: Real>(pts: Vec<Point4<T>>) -> Vec<Point4<T>> {
    let mut kept: Vec<[f64; 4]> = Vec::new();
    let mut out = Vec::new();
    for p in pts {
        let q = p.map(|v| v.to_f64());
        if !kept.iter().any(|k| k.iter().zip(&q).all(|(a, b)| (a - b).abs() <= SAME_POINT)) {
            kept.push(q);
            out.push(p);
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrbitInstance<T = f64> {
    pub family: OrbitFamily,
    pub params: Vec<T>,
}

impl<T: Real> OrbitInstance<T> {
    pub fn new(family: OrbitFamily, params: Vec<T>) -> Result<Self> {
        if params.len() != family.n_params {
            return Err(param_err!("S{} takes {} parameters, got {}", family.family_id, family.n_params, params.len()));
        }
        Ok(OrbitInstance { family, params })
    }

    /// Points of the orbit. Strict: parameters outside the box are an error.
    pub fn expand(&self) -> Result<Vec<Point4<T>>> {
        if !in_box(&self.family, &self.params, 1e-14) {
            return Err(Error::Domain(format!(
                "parameters {:?} outside the admissible box of {} S{}",
                self.params.iter().map(|p| p.to_f64()).collect::<Vec<_>>(),
                self.family.kind,
                self.family.family_id
            )));
        }
        self.expand_unchecked()
    }

    /// Clamps first, then expands.
    pub fn expand_clamped(&self) -> Vec<Point4<T>> {
        let inst = OrbitInstance { family: self.family, params: clamp_params(&self.family, &self.params) };
        inst.expand_unchecked().expect("parameter count checked at construction")
    }

    fn expand_unchecked(&self) -> Result<Vec<Point4<T>>> {
        let x = seed_point(&self.family, &self.params)?;
        Ok(dedup_points(group_images(self.family.kind, &x)))
    }

    /// True when the expansion has the nominal cardinality.
    pub fn is_generic(&self) -> bool {
        self.expand_clamped().len() == self.family.cardinality
    }
}
