//! Degeneration sequences of 0/1-polytopes, from the unit d-cube down to the
//! standard d-simplex by removing one vertex at a time.
//!
//! Two families are provided. [`sequence_a`] is built recursively and passes
//! through the prism over the standard (d-1)-simplex; [`sequence_b`] removes the
//! non-simplex vertices in decreasing binary order.

use std::collections::BTreeSet;
use std::fmt;

use num_rational::Ratio;

use crate::error::{param_err, Result};

pub const MAX_DIM: usize = 6;

/// Vertex of the unit d-cube; bit `i` of `bits` is coordinate `i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ZeroOneVertex {
    dim: u8,
    bits: u8,
}

impl ZeroOneVertex {
    pub fn new(coords: &[u8]) -> Result<Self> {
        if coords.is_empty() || coords.len() > 8 {
            return Err(param_err!("vertex dimension must be in 1..=8, got {}", coords.len()));
        }
        let mut bits = 0u8;
        for (i, &c) in coords.iter().enumerate() {
            match c {
                0 => {}
                1 => bits |= 1 << i,
                _ => return Err(param_err!("vertex coordinates must be 0 or 1, got {c}")),
            }
        }
        Ok(ZeroOneVertex { dim: coords.len() as u8, bits })
    }

    /// Parses the abbreviated form, e.g. `"1101"`.
    pub fn parse(s: &str) -> Result<Self> {
        let coords: Vec<u8> = s
            .chars()
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                _ => Err(param_err!("bad vertex string {s:?}")),
            })
            .collect::<Result<_>>()?;
        Self::new(&coords)
    }

    pub fn dim(&self) -> usize {
        self.dim as usize
    }

    pub fn coord(&self, i: usize) -> u8 {
        (self.bits >> i) & 1
    }

    pub fn coords(&self) -> Vec<u8> {
        (0..self.dim()).map(|i| self.coord(i)).collect()
    }

    /// Appends one coordinate.
    pub fn extend(&self, last: u8) -> Self {
        ZeroOneVertex { dim: self.dim + 1, bits: self.bits | ((last & 1) << self.dim) }
    }

    /// Drops the last coordinate.
    pub fn base(&self) -> (Self, u8) {
        let d = self.dim - 1;
        (ZeroOneVertex { dim: d, bits: self.bits & !(1 << d) }, self.coord(d as usize))
    }

    /// Value of the bit string read as a binary number, first coordinate most
    /// significant.
    pub fn binary_value(&self) -> u32 {
        self.coords().iter().fold(0, |acc, &c| (acc << 1) | c as u32)
    }
}

impl fmt::Display for ZeroOneVertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in self.coords() {
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZeroOnePolytope {
    pub dim: usize,
    pub vertices: BTreeSet<ZeroOneVertex>,
    pub label: usize,
}

impl ZeroOnePolytope {
    pub fn cube(dim: usize) -> Self {
        let vertices = (0..1u16 << dim).map(|b| ZeroOneVertex { dim: dim as u8, bits: b as u8 }).collect();
        ZeroOnePolytope { dim, vertices, label: 0 }
    }

    /// Origin plus the unit vectors.
    pub fn standard_simplex(dim: usize) -> Self {
        let mut vertices = BTreeSet::new();
        vertices.insert(ZeroOneVertex { dim: dim as u8, bits: 0 });
        for i in 0..dim {
            vertices.insert(ZeroOneVertex { dim: dim as u8, bits: 1 << i });
        }
        ZeroOnePolytope { dim, vertices, label: 0 }
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Affine dimension of the vertex set, by exact elimination.
    pub fn affine_dim(&self) -> usize {
        let mut it = self.vertices.iter();
        let Some(v0) = it.next() else { return 0 };
        let rows: Vec<Vec<Ratio<i64>>> = it
            .map(|v| (0..self.dim).map(|i| Ratio::from_integer(v.coord(i) as i64 - v0.coord(i) as i64)).collect())
            .collect();
        exact_rank(rows, self.dim)
    }

    pub fn is_full_dimensional(&self) -> bool {
        self.affine_dim() == self.dim
    }

    pub fn same_vertices(&self, other: &ZeroOnePolytope) -> bool {
        self.vertices == other.vertices
    }
}

fn exact_rank(mut rows: Vec<Vec<Ratio<i64>>>, cols: usize) -> usize {
    let zero = Ratio::from_integer(0);
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows.len()).find(|&r| rows[r][c] != zero) else {
            continue;
        };
        rows.swap(rank, p);
        let pivot = rows[rank][c];
        for r in 0..rows.len() {
            if r != rank && rows[r][c] != zero {
                let f = rows[r][c] / pivot;
                for k in c..cols {
                    let sub = f * rows[rank][k];
                    rows[r][k] -= sub;
                }
            }
        }
        rank += 1;
    }
    rank
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegenerationSequence {
    pub dim: usize,
    pub polytopes: Vec<ZeroOnePolytope>,
    pub removed: Vec<ZeroOneVertex>,
}

impl DegenerationSequence {
    fn from_removed(dim: usize, removed: Vec<ZeroOneVertex>) -> Self {
        let mut current = ZeroOnePolytope::cube(dim);
        let mut polytopes = vec![current.clone()];
        for (i, v) in removed.iter().enumerate() {
            current.vertices.remove(v);
            current.label = i + 1;
            polytopes.push(current.clone());
        }
        DegenerationSequence { dim, polytopes, removed }
    }

    /// The element halfway through `sequence_a`, index `2^d - 2d`.
    pub fn prism_index(&self) -> usize {
        (1usize << self.dim).saturating_sub(2 * self.dim)
    }
}

fn check_dim(d: usize) -> Result<()> {
    if (1..=MAX_DIM).contains(&d) {
        Ok(())
    } else {
        Err(param_err!("dimension must be in 1..={MAX_DIM}, got {d}"))
    }
}

fn removed_a(d: usize) -> Vec<ZeroOneVertex> {
    match d {
        1 => vec![],
        2 => vec![ZeroOneVertex { dim: 2, bits: 0b11 }],
        _ => {
            let mut out = Vec::new();
            for v in removed_a(d - 1) {
                out.push(v.extend(1));
                out.push(v.extend(0));
            }
            // e_j + e_d for j = 1..d-1
            for j in 0..d - 1 {
                out.push(ZeroOneVertex { dim: d as u8, bits: (1 << j) | (1 << (d - 1)) });
            }
            out
        }
    }
}

/// Recursive sequence through the prism over the (d-1)-simplex.
pub fn sequence_a(d: usize) -> Result<DegenerationSequence> {
    check_dim(d)?;
    Ok(DegenerationSequence::from_removed(d, removed_a(d)))
}

/// Non-simplex vertices of the d-cube removed in decreasing binary order.
pub fn sequence_b(d: usize) -> Result<DegenerationSequence> {
    check_dim(d)?;
    let simplex = ZeroOnePolytope::standard_simplex(d);
    let mut removed: Vec<ZeroOneVertex> =
        ZeroOnePolytope::cube(d).vertices.into_iter().filter(|v| !simplex.vertices.contains(v)).collect();
    removed.sort_by_key(|v| std::cmp::Reverse(v.binary_value()));
    Ok(DegenerationSequence::from_removed(d, removed))
}

/// True iff `p` is `q x [0, 1]` with the extrusion in the last coordinate.
pub fn is_prism_over(p: &ZeroOnePolytope, q: &ZeroOnePolytope) -> Result<bool> {
    if p.dim != q.dim + 1 {
        return Err(param_err!("prism test needs dim(p) = dim(q) + 1, got {} and {}", p.dim, q.dim));
    }
    if p.len() != 2 * q.len() {
        return Ok(false);
    }
    let expected: BTreeSet<ZeroOneVertex> = q.vertices.iter().flat_map(|v| [v.extend(0), v.extend(1)]).collect();
    Ok(expected == p.vertices)
}

pub fn vertex_count_profile(seq: &DegenerationSequence) -> Vec<usize> {
    seq.polytopes.iter().map(ZeroOnePolytope::len).collect()
}

/// Plain-text dump: the removed vertices, one per line.
pub fn format_removed(seq: &DegenerationSequence) -> String {
    seq.removed.iter().map(|v| format!("{v}\n")).collect()
}

/// Plain-text dump of every polytope's vertex set, blocks separated by a
/// blank line.
pub fn format_polytopes(seq: &DegenerationSequence) -> String {
    let blocks: Vec<String> =
        seq.polytopes.iter().map(|p| p.vertices.iter().map(|v| format!("{v}\n")).collect()).collect();
    blocks.join("\n")
}
