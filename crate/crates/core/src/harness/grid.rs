//! Kuhn-Freudenthal grids of `[0, 1]^4`.

use crate::elements::{reference_to_unit, ElementKind, Point4};
use crate::error::{param_err, Error, Result};
use crate::par::{map_indexed, tree_sum, Execution};
use crate::real::Real;
use crate::rules::QuadratureRule;

pub const MAX_SUBDIVISIONS: usize = 12;

/// One cell: subcube `corner / m + [0, 1/m]^4`, split by `perm` when the
/// element is a simplex or prism.
///
/// The unit element maps onto the cell by
/// `x_{perm[j]} = (corner_{perm[j]} + sum_{k >= j} u_k) / m` on the permuted
/// axes (identity on the extruded axis of the prism), a unimodular map scaled
/// by `1/m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Cell {
    pub corner: [u32; 4],
    /// Permutation of the simplicial axes (first 3 for the prism, all 4 for
    /// the pentatope); unused for the tesseract.
    pub perm: [u8; 4],
}

#[derive(Debug, Clone, PartialEq)]
pub struct Grid4 {
    pub kind: ElementKind,
    pub m: usize,
    pub cells: Vec<Cell>,
}

fn simplicial_axes(kind: ElementKind) -> usize {
    match kind {
        ElementKind::Tesseract => 0,
        ElementKind::TetPrism => 3,
        ElementKind::Pentatope => 4,
    }
}

fn permutations(n: usize) -> Vec<[u8; 4]> {
    let mut out = Vec::new();
    let mut cur = [0u8, 1, 2, 3];
    fn rec(k: usize, n: usize, cur: &mut [u8; 4], out: &mut Vec<[u8; 4]>) {
        if k == n {
            out.push(*cur);
            return;
        }
        for i in k..n {
            cur.swap(k, i);
            rec(k + 1, n, cur, out);
            cur.swap(k, i);
        }
    }
    rec(0, n, &mut cur, &mut out);
    out.sort();
    out
}

pub fn kuhn_freudenthal(kind: ElementKind, m: usize) -> Result<Grid4> {
    if !(1..=MAX_SUBDIVISIONS).contains(&m) {
        return Err(param_err!("subdivisions must be in 1..={MAX_SUBDIVISIONS}, got {m}"));
    }
    let perms = permutations(simplicial_axes(kind));
    let mut cells = Vec::with_capacity(m.pow(4) * perms.len());
    let m32 = m as u32;
    for a in 0..m32 {
        for b in 0..m32 {
            for c in 0..m32 {
                for d in 0..m32 {
                    for &perm in &perms {
                        cells.push(Cell { corner: [a, b, c, d], perm });
                    }
                }
            }
        }
    }
    Ok(Grid4 { kind, m, cells })
}

impl Grid4 {
    pub fn n_cells(&self) -> usize {
        self.cells.len()
    }

    /// Characteristic length `(1 / N_elem)^(1/4)`.
    pub fn h(&self) -> f64 {
        (1.0 / self.cells.len() as f64).powf(0.25)
    }

    /// Volume of one cell.
    pub fn cell_volume(&self) -> f64 {
        let simplex_factor = match self.kind {
            ElementKind::Tesseract => 1.0,
            ElementKind::TetPrism => 1.0 / 6.0,
            ElementKind::Pentatope => 1.0 / 24.0,
        };
        simplex_factor / (self.m as f64).powi(4)
    }

    /// Image of a unit-element point in cell `c`.
    pub fn map_point<T: Real>(&self, c: &Cell, u: &Point4<T>) -> Point4<T> {
        let n = simplicial_axes(self.kind);
        let inv_m = T::one() / T::from_usize(self.m);
        let mut x = [T::zero(); 4];
        let mut tail = T::zero();
        for j in (0..n).rev() {
            tail += u[j];
            x[c.perm[j] as usize] = tail;
        }
        for j in n..4 {
            x[j] = u[j];
        }
        std::array::from_fn(|i| (T::from_f64(c.corner[i] as f64) + x[i]) * inv_m)
    }

    /// Half-open membership: the subcube is `[k/m, (k+1)/m)` per axis (closed
    /// at 1), and the simplicial axes must be sorted descending by `perm`
    /// with ties resolved in favour of the lower axis index first.
    pub fn cell_contains(&self, c: &Cell, x: &Point4) -> bool {
        let m = self.m as f64;
        let mut local = [0.0; 4];
        for i in 0..4 {
            let k = ((x[i] * m).floor() as u32).min(self.m as u32 - 1);
            if k != c.corner[i] {
                return false;
            }
            local[i] = x[i] * m - k as f64;
        }
        let n = simplicial_axes(self.kind);
        for j in 0..n.saturating_sub(1) {
            let (p, q) = (c.perm[j] as usize, c.perm[j + 1] as usize);
            let ok = local[p] > local[q] || (local[p] == local[q] && p < q);
            if !ok {
                return false;
            }
        }
        true
    }
}

/// Sum over cells of the mapped rule applied to `f`; partial sums are
/// combined in a fixed tree order.
pub fn grid_integrate<T: Real>(
    grid: &Grid4,
    rule: &QuadratureRule,
    f: impl Fn(&Point4<T>) -> T + Sync + Send,
    exec: Execution,
) -> Result<T> {
    if rule.kind != grid.kind {
        return Err(Error::Parameter(format!("{} rule used on a {} grid", rule.kind, grid.kind)));
    }
    let (pts, wts) = rule.nodes::<T>();
    let unit: Vec<Point4<T>> = pts.iter().map(reference_to_unit).collect();
    // reference -> unit scales volume by 1/16; unit -> cell by 1/m^4
    let scale = T::one() / (T::from_f64(16.0) * T::from_usize(grid.m.pow(4)));
    let w: Vec<T> = wts.iter().map(|&v| v * scale).collect();
    let partials = map_indexed(exec, grid.cells.len(), |i| {
        let c = &grid.cells[i];
        unit.iter().zip(&w).map(|(u, &wi)| wi * f(&grid.map_point(c, u))).sum::<T>()
    });
    Ok(tree_sum(&partials))
}
