//! Levenberg-Marquardt on the weight-eliminated problem, and a Gauss-Newton
//! polish of the full system in double-double.

use crate::linalg::{cholesky_solve, lstsq, Matrix};
use crate::real::{Dd, Real};
use crate::symmetry::clamp_params;

use super::{matrix_from_columns, penalty_term, weight_rcond, Problem, SolveConfig};

#[derive(Debug, Clone, PartialEq)]
pub struct LmOutcome {
    pub params: Vec<f64>,
    pub weights: Vec<f64>,
    /// Norm of the moment residual (penalty excluded).
    pub residual: f64,
    pub iterations: usize,
}

const FD_STEP: f64 = 1e-7;
const STALL_WINDOW: usize = 20;
const STALL_GAIN: f64 = 1e-3;
// f64 moment residuals do not go much below this
const DOUBLE_FLOOR: f64 = 1e-14;

struct State {
    cols: Vec<Vec<f64>>,
    sizes: Vec<usize>,
    weights: Vec<f64>,
    /// moment residual, then the penalty when enabled
    r: Vec<f64>,
    moment_norm: f64,
    norm: f64,
}

fn clamp_all(problem: &Problem, flat: &[f64]) -> Vec<f64> {
    (0..problem.n_orbits()).flat_map(|o| clamp_params(&problem.families()[o], problem.orbit_params(flat, o))).collect()
}

fn finish(problem: &Problem, cols: Vec<Vec<f64>>, sizes: Vec<usize>, penalty: bool) -> State {
    let a = matrix_from_columns(&cols, problem.n_equations());
    let b = problem.system.rhs_as::<f64>();
    let sol = lstsq(&a, &b, weight_rcond::<f64>());
    let mut r: Vec<f64> = a.mul_vec(&sol.x).iter().zip(&b).map(|(x, y)| x - y).collect();
    let moment_norm = norm(&r);
    if penalty {
        r.push(penalty_term(&sol.x, &sizes));
    }
    let n = norm(&r);
    State { cols, sizes, weights: sol.x, r, moment_norm, norm: if n.is_finite() { n } else { f64::INFINITY } }
}

fn evaluate(problem: &Problem, flat: &[f64], penalty: bool) -> State {
    let mut cols = Vec::with_capacity(problem.n_orbits());
    let mut sizes = Vec::with_capacity(problem.n_orbits());
    for o in 0..problem.n_orbits() {
        let pts = problem.orbit_points(o, problem.orbit_params(flat, o));
        sizes.push(pts.len());
        cols.push(problem.system.orbit_sums(&pts));
    }
    finish(problem, cols, sizes, penalty)
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Forward-difference Jacobian of the residual with respect to the orbit
/// parameters; only the perturbed orbit's column is recomputed.
fn jacobian(problem: &Problem, flat: &[f64], st: &State, penalty: bool) -> Matrix<f64> {
    let m = st.r.len();
    let n = flat.len();
    let mut jac = Matrix::zeros(m, n);
    for j in 0..n {
        let o = problem.owner(j);
        let fam = problem.families()[o];
        let base = problem.orbit_params(flat, o);
        let local = j - (0..o).map(|q| problem.families()[q].n_params).sum::<usize>();
        let h = FD_STEP * flat[j].abs().max(1.0);
        let mut step = 0.0;
        let mut moved = base.to_vec();
        for dir in [h, -h] {
            let mut trial = base.to_vec();
            trial[local] += dir;
            let trial = clamp_params(&fam, &trial);
            if trial[local] != base[local] {
                step = trial[local] - base[local];
                moved = trial;
                break;
            }
        }
        if step == 0.0 {
            continue;
        }
        let pts = problem.orbit_points(o, &moved);
        let mut cols = st.cols.clone();
        let mut sizes = st.sizes.clone();
        sizes[o] = pts.len();
        cols[o] = problem.system.orbit_sums(&pts);
        let pert = finish(problem, cols, sizes, penalty);
        for i in 0..m {
            jac[(i, j)] = (pert.r[i] - st.r[i]) / step;
        }
    }
    jac
}

/// Minimizes the weight-eliminated residual from `start`. `cancel` is polled
/// once per iteration.
pub fn levenberg_marquardt(
    problem: &Problem,
    start: &[f64],
    cfg: &SolveConfig,
    cancel: &(dyn Fn() -> bool + Sync),
) -> LmOutcome {
    let penalty = cfg.penalty_on;
    let mut x = clamp_all(problem, start);
    let mut st = evaluate(problem, &x, penalty);
    let mut mu = 1e-3;
    let mut history = vec![st.norm];
    let mut it = 0;
    let stop = DOUBLE_FLOOR.max(cfg.residual_tol);
    while it < cfg.max_iterations && !x.is_empty() {
        if st.norm <= stop || cancel() {
            break;
        }
        it += 1;
        let jac = jacobian(problem, &x, &st, penalty);
        let jt = jac.transpose();
        let jtj = jt.matmul(&jac);
        let g = jt.mul_vec(&st.r);
        let dmax = (0..x.len()).map(|i| jtj[(i, i)]).fold(0.0, f64::max);
        if dmax == 0.0 {
            break;
        }
        let mut improved = false;
        while mu < 1e12 {
            let mut a = jtj.clone();
            for i in 0..x.len() {
                a[(i, i)] += mu * jtj[(i, i)].max(1e-12 * dmax);
            }
            let neg_g: Vec<f64> = g.iter().map(|v| -v).collect();
            let Some(delta) = cholesky_solve(&a, &neg_g) else {
                mu *= 4.0;
                continue;
            };
            let trial: Vec<f64> = x.iter().zip(&delta).map(|(a, b)| a + b).collect();
            let trial = clamp_all(problem, &trial);
            let ts = evaluate(problem, &trial, penalty);
            if ts.norm < st.norm {
                x = trial;
                st = ts;
                mu = (mu * 0.3).max(1e-15);
                improved = true;
                break;
            }
            mu *= 4.0;
        }
        history.push(st.norm);
        if !improved {
            break;
        }
        if history.len() > STALL_WINDOW {
            let then = history[history.len() - 1 - STALL_WINDOW];
            if st.norm > then * (1.0 - STALL_GAIN) {
                break;
            }
        }
    }
    LmOutcome { params: x, weights: st.weights, residual: st.moment_norm, iterations: it }
}

/// Gauss-Newton on parameters and weights together in double-double,
/// starting from a double-precision solution. Returns parameters, weights
/// and the moment residual norm.
pub fn polish_extended(
    problem: &Problem,
    params: &[f64],
    weights: &[f64],
    target: f64,
    max_iterations: usize,
) -> (Vec<Dd>, Vec<Dd>, Dd) {
    let np = params.len();
    let no = problem.n_orbits();
    let mut theta: Vec<Dd> = params.iter().map(|&v| Dd::from_f64(v)).collect();
    let mut w: Vec<Dd> = weights.iter().map(|&v| Dd::from_f64(v)).collect();
    let b = problem.system.rhs_as::<Dd>();
    let clamp = |t: &[Dd]| -> Vec<Dd> {
        (0..no).flat_map(|o| clamp_params(&problem.families()[o], problem.orbit_params(t, o))).collect()
    };
    let cols_of =
        |t: &[Dd]| -> Vec<Vec<Dd>> { (0..no).map(|o| problem.column(o, problem.orbit_params(t, o))).collect() };
    let resid = |cols: &[Vec<Dd>], w: &[Dd]| -> Vec<Dd> {
        (0..b.len()).map(|i| (0..no).map(|o| cols[o][i] * w[o]).sum::<Dd>() - b[i]).collect()
    };
    let nrm = |r: &[Dd]| r.iter().map(|&v| v * v).sum::<Dd>().sqrt();

    theta = clamp(&theta);
    let mut cols = cols_of(&theta);
    let mut r = resid(&cols, &w);
    let mut current = nrm(&r);
    for _ in 0..max_iterations {
        if current.to_f64() <= target {
            break;
        }
        let m = r.len();
        let mut jac = Matrix::<Dd>::zeros(m, np + no);
        let mut off = 0;
        for o in 0..no {
            let fam = problem.families()[o];
            let base = problem.orbit_params(&theta, o).to_vec();
            for local in 0..fam.n_params {
                let h = Dd::from_f64(1e-10 * base[local].to_f64().abs().max(1.0));
                let mut plus = base.clone();
                plus[local] += h;
                let plus = clamp_params(&fam, &plus);
                let mut minus = base.clone();
                minus[local] -= h;
                let minus = clamp_params(&fam, &minus);
                let span = plus[local] - minus[local];
                if span.to_f64() != 0.0 {
                    let cp = problem.column(o, &plus);
                    let cm = problem.column(o, &minus);
                    for i in 0..m {
                        jac[(i, off + local)] = (cp[i] - cm[i]) / span * w[o];
                    }
                }
            }
            for i in 0..m {
                jac[(i, np + o)] = cols[o][i];
            }
            off += fam.n_params;
        }
        let neg: Vec<Dd> = r.iter().map(|&v| -v).collect();
        let delta = lstsq(&jac, &neg, 1e-26).x;
        let mut scale = Dd::one();
        let mut accepted = false;
        for _ in 0..6 {
            let t2: Vec<Dd> = theta.iter().zip(&delta[..np]).map(|(&a, &d)| a + d * scale).collect();
            let t2 = clamp(&t2);
            let w2: Vec<Dd> = w.iter().zip(&delta[np..]).map(|(&a, &d)| a + d * scale).collect();
            let c2 = cols_of(&t2);
            let r2 = resid(&c2, &w2);
            let n2 = nrm(&r2);
            if n2 < current {
                theta = t2;
                w = w2;
                cols = c2;
                r = r2;
                current = n2;
                accepted = true;
                break;
            }
            scale = scale * Dd::from_f64(0.5);
        }
        if !accepted {
            break;
        }
    }
    (theta, w, current)
}
