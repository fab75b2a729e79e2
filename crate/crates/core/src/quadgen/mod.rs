//! Fully symmetric rule generation by moment matching.
//!
//! Unknowns are orbit parameters and one weight per orbit. Weights enter
//! linearly and are eliminated by a minimum-norm least-squares solve, leaving
//! a nonlinear least-squares problem in the orbit parameters only, which is
//! attacked with Levenberg-Marquardt from random starts.

mod lm;
mod moments;
mod search;
mod verify;

pub use lm::{levenberg_marquardt, polish_extended, LmOutcome};
pub use moments::{invariant_count, total_degree_set, MomentSystem};
pub use search::{search, search_decomposition, task_seed};
pub use verify::{verify_rule, verify_rule_with, VerifyReport};

use std::sync::Arc;

use crate::decomp::Decomposition;
use crate::elements::{ElementKind, Point4};
use crate::error::{param_err, Result};
use crate::linalg::{lstsq, Matrix};
use crate::real::{Precision, Real};
use crate::rules::QuadratureRule;
use crate::symmetry::{OrbitFamily, OrbitInstance};

#[derive(Debug, Clone, PartialEq)]
pub struct SolveConfig {
    pub max_iterations: usize,
    pub residual_tol: f64,
    pub n_starts: usize,
    pub rng_seed: u64,
    pub penalty_on: bool,
    pub precision_mode: Precision,
    /// Skip decompositions with fewer unknowns than equations.
    pub skip_underdetermined: bool,
    pub exec: crate::par::Execution,
}

impl Default for SolveConfig {
    fn default() -> Self {
        SolveConfig {
            max_iterations: 200,
            residual_tol: 1e-14,
            n_starts: 64,
            rng_seed: 0,
            penalty_on: true,
            precision_mode: Precision::Double,
            skip_underdetermined: true,
            exec: crate::par::Execution::default(),
        }
    }
}

impl SolveConfig {
    pub fn extended() -> Self {
        SolveConfig { residual_tol: 1e-30, precision_mode: Precision::Extended, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.residual_tol > 0.0) {
            return Err(param_err!("residual tolerance must be positive"));
        }
        if self.n_starts == 0 {
            return Err(param_err!("at least one start is required"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct SearchResult {
    pub decomposition: Decomposition,
    pub rule: Option<QuadratureRule>,
    pub residual: f64,
    pub iterations_used: usize,
    pub starts_used: usize,
}

/// One decomposition's moment problem.
#[derive(Debug, Clone)]
pub struct Problem {
    pub system: Arc<MomentSystem>,
    pub decomposition: Decomposition,
    families: Vec<OrbitFamily>,
    offsets: Vec<usize>,
}

impl Problem {
    pub fn new(kind: ElementKind, strength: usize, decomposition: &Decomposition) -> Result<Self> {
        if decomposition.kind != kind {
            return Err(param_err!("{} decomposition used for {kind}", decomposition.kind));
        }
        let system = MomentSystem::get(kind, strength)?;
        let families = decomposition.orbit_list();
        let mut offsets = vec![0];
        for f in &families {
            offsets.push(offsets.last().unwrap() + f.n_params);
        }
        Ok(Problem { system, decomposition: decomposition.clone(), families, offsets })
    }

    pub fn kind(&self) -> ElementKind {
        self.system.kind
    }

    pub fn n_params(&self) -> usize {
        *self.offsets.last().unwrap()
    }

    pub fn n_orbits(&self) -> usize {
        self.families.len()
    }

    pub fn n_equations(&self) -> usize {
        self.system.n_equations()
    }

    pub fn families(&self) -> &[OrbitFamily] {
        &self.families
    }

    /// Orbit `o`'s slice of the flat parameter vector.
    pub fn orbit_params<'a, T>(&self, flat: &'a [T], o: usize) -> &'a [T] {
        &flat[self.offsets[o]..self.offsets[o + 1]]
    }

    /// Index of the orbit owning flat parameter `j`.
    pub fn owner(&self, j: usize) -> usize {
        self.offsets.partition_point(|&off| off <= j) - 1
    }

    fn check_params<T>(&self, flat: &[T]) -> Result<()> {
        if flat.len() != self.n_params() {
            return Err(param_err!("expected {} orbit parameters, got {}", self.n_params(), flat.len()));
        }
        Ok(())
    }

    /// Clamped expansion of orbit `o`.
    pub fn orbit_points<T: Real>(&self, o: usize, params: &[T]) -> Vec<Point4<T>> {
        OrbitInstance { family: self.families[o], params: params.to_vec() }.expand_clamped()
    }

    pub fn column<T: Real>(&self, o: usize, params: &[T]) -> Vec<T> {
        self.system.orbit_sums(&self.orbit_points(o, params))
    }

    /// Moment matrix: entry `(k, o)` is the sum of representative `k` over
    /// orbit `o`.
    pub fn moment_matrix<T: Real>(&self, flat: &[T]) -> Result<Matrix<T>> {
        self.check_params(flat)?;
        let cols: Vec<Vec<T>> = (0..self.n_orbits()).map(|o| self.column(o, self.orbit_params(flat, o))).collect();
        Ok(matrix_from_columns(&cols, self.n_equations()))
    }

    /// Points per orbit after clamping (fewer than nominal when degenerate).
    pub fn orbit_sizes<T: Real>(&self, flat: &[T]) -> Vec<usize> {
        (0..self.n_orbits()).map(|o| self.orbit_points(o, self.orbit_params(flat, o)).len()).collect()
    }

    pub fn residual<T: Real>(&self, flat: &[T], weights: &[T], penalty: bool) -> Result<Vec<T>> {
        if weights.len() != self.n_orbits() {
            return Err(param_err!("expected {} weights, got {}", self.n_orbits(), weights.len()));
        }
        let a = self.moment_matrix(flat)?;
        let mut r: Vec<T> = a.mul_vec(weights).into_iter().zip(self.system.rhs_as::<T>()).map(|(x, b)| x - b).collect();
        if penalty {
            r.push(penalty_term(weights, &self.orbit_sizes(flat)));
        }
        Ok(r)
    }

    pub fn solve_weights<T: Real>(&self, flat: &[T]) -> Result<(Vec<T>, T)> {
        let a = self.moment_matrix(flat)?;
        let sol = lstsq(&a, &self.system.rhs_as::<T>(), weight_rcond::<T>());
        Ok((sol.x, sol.residual_norm))
    }
}

pub(crate) fn weight_rcond<T: Real>() -> f64 {
    if std::mem::size_of::<T>() > 8 {
        1e-28
    } else {
        1e-13
    }
}

pub(crate) fn matrix_from_columns<T: Real>(cols: &[Vec<T>], rows: usize) -> Matrix<T> {
    Matrix::from_fn(rows, cols.len(), |i, j| cols[j][i])
}

/// `sum_i (w_i - |w_i|) / 2` over expanded points.
pub(crate) fn penalty_term<T: Real>(weights: &[T], sizes: &[usize]) -> T {
    weights.iter().zip(sizes).map(|(&w, &n)| if w.to_f64() < 0.0 { w * T::from_usize(n) } else { T::zero() }).sum()
}

/// Moment residual for explicit parameters and weights; with `penalty` the
/// last entry is the (non-positive) negative-weight penalty.
pub fn residual<T: Real>(
    kind: ElementKind,
    strength: usize,
    decomposition: &Decomposition,
    orbit_params: &[T],
    weights: &[T],
    penalty: bool,
) -> Result<Vec<T>> {
    Problem::new(kind, strength, decomposition)?.residual(orbit_params, weights, penalty)
}

/// Least-squares weights for given orbit parameters, and the residual norm.
pub fn solve_weights<T: Real>(
    kind: ElementKind,
    strength: usize,
    decomposition: &Decomposition,
    orbit_params: &[T],
) -> Result<(Vec<T>, T)> {
    Problem::new(kind, strength, decomposition)?.solve_weights(orbit_params)
}
