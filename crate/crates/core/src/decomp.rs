//! Orbital decompositions: multisets of orbit families whose cardinalities
//! add up to a target point count.

use std::collections::BTreeMap;

use crate::elements::ElementKind;
use crate::error::{param_err, Result};
use crate::symmetry::{orbit_families, OrbitFamily};

pub const MAX_POINTS: usize = 2000;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Decomposition {
    pub kind: ElementKind,
    /// family id -> multiplicity; zero multiplicities are not stored.
    pub counts: BTreeMap<usize, usize>,
    pub total_points: usize,
    /// Orbit parameters plus one weight per orbit.
    pub n_free_params: usize,
}

impl Decomposition {
    pub fn from_counts(kind: ElementKind, counts: BTreeMap<usize, usize>) -> Result<Self> {
        let fams = orbit_families(kind);
        let mut total = 0;
        let mut free = 0;
        for (&id, &m) in &counts {
            let f = fams.get(id.wrapping_sub(1)).ok_or_else(|| param_err!("{kind} has no family S{id}"))?;
            total += m * f.cardinality;
            free += m * (f.n_params + 1);
        }
        let counts = counts.into_iter().filter(|&(_, m)| m > 0).collect();
        Ok(Decomposition { kind, counts, total_points: total, n_free_params: free })
    }

    pub fn n_orbits(&self) -> usize {
        self.counts.values().sum()
    }

    pub fn n_abscissa_params(&self) -> usize {
        self.n_free_params - self.n_orbits()
    }

    /// One family per orbit, ascending family id.
    pub fn orbit_list(&self) -> Vec<OrbitFamily> {
        let fams = orbit_families(self.kind);
        self.counts.iter().flat_map(|(&id, &m)| std::iter::repeat_n(fams[id - 1], m)).collect()
    }
}

/// Canonical text form, e.g. `S1^1 S3^1 S4^1 S5^1`.
pub fn decomposition_signature(d: &Decomposition) -> Result<String> {
    if d.counts.is_empty() {
        return Err(param_err!("empty decomposition has no signature"));
    }
    Ok(d.counts.iter().map(|(id, m)| format!("S{id}^{m}")).collect::<Vec<_>>().join(" "))
}

/// Calls `visit` for every decomposition, in no particular order.
pub fn for_each_decomposition(kind: ElementKind, n_points: usize, max_s1: usize, mut visit: impl FnMut(&[usize])) {
    let fams = orbit_families(kind);
    let mut counts = vec![0usize; fams.len()];
    // largest families first
    fn rec(
        fams: &[OrbitFamily],
        pos: usize,
        remaining: usize,
        max_s1: usize,
        counts: &mut Vec<usize>,
        visit: &mut dyn FnMut(&[usize]),
    ) {
        if remaining == 0 {
            visit(counts);
            return;
        }
        if pos == 0 {
            return;
        }
        let idx = pos - 1;
        let f = &fams[idx];
        let mut cap = remaining / f.cardinality;
        if f.cardinality == 1 {
            cap = cap.min(max_s1);
        }
        for m in (0..=cap).rev() {
            counts[idx] = m;
            rec(fams, idx, remaining - m * f.cardinality, max_s1, counts, visit);
        }
        counts[idx] = 0;
    }
    rec(&fams, fams.len(), n_points, max_s1, &mut counts, &mut visit);
}

/// All decompositions of `n_points`, ordered by free-parameter count and then
/// signature. `max_s1` caps the multiplicity of the one-point family.
pub fn enumerate_decompositions(kind: ElementKind, n_points: usize, max_s1: usize) -> Result<Vec<Decomposition>> {
    if n_points == 0 || n_points > MAX_POINTS {
        return Err(param_err!("point count must be in 1..={MAX_POINTS}, got {n_points}"));
    }
    let mut out = Vec::new();
    for_each_decomposition(kind, n_points, max_s1, |counts| {
        let map = counts.iter().enumerate().filter(|(_, &m)| m > 0).map(|(i, &m)| (i + 1, m)).collect();
        out.push(Decomposition::from_counts(kind, map).expect("ids come from the family table"));
    });
    let mut keyed: Vec<(String, Decomposition)> =
        out.into_iter().map(|d| (decomposition_signature(&d).expect("non-empty"), d)).collect();
    keyed.sort_by(|a, b| a.1.n_free_params.cmp(&b.1.n_free_params).then_with(|| a.0.cmp(&b.0)));
    Ok(keyed.into_iter().map(|(_, d)| d).collect())
}

/// Number of decompositions by dynamic programming (coin change with the
/// one-point family capped at `max_s1`). Independent of the enumerator.
pub fn count_decompositions_dp(kind: ElementKind, n_points: usize, max_s1: usize) -> u64 {
    let mut ways = vec![0u64; n_points + 1];
    ways[0] = 1;
    for f in orbit_families(kind) {
        if f.cardinality == 1 {
            // bounded: at most max_s1 copies
            let prev = ways.clone();
            for n in 0..=n_points {
                let mut s = 0;
                for m in 0..=max_s1.min(n) {
                    s += prev[n - m];
                }
                ways[n] = s;
            }
        } else {
            for n in f.cardinality..=n_points {
                ways[n] += ways[n - f.cardinality];
            }
        }
    }
    ways[n_points]
}
