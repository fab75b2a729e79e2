//! Multi-start search over decompositions.
//!
//! Starts of one decomposition run in parallel. Once start `i` yields an
//! admissible rule, starts with a larger index are cancelled, and the
//! smallest successful index wins, so the outcome does not depend on
//! scheduling.

use std::sync::atomic::{AtomicUsize, Ordering};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::decomp::{decomposition_signature, enumerate_decompositions, Decomposition};
use crate::elements::{strictly_inside, ElementKind};
use crate::error::Result;
use crate::par::map_indexed;
use crate::real::Dd;
use crate::rules::{OrbitWeight, Provenance, QuadratureRule};
use crate::symmetry::{clamp_params, sample_params, OrbitInstance};

use super::{levenberg_marquardt, polish_extended, Problem, SearchResult, SolveConfig};

// LM results below this are worth polishing
const POLISH_THRESHOLD: f64 = 1e-8;
const POLISH_ITERATIONS: usize = 30;
const MIN_WEIGHT: f64 = 1e-16;
const INTERIOR_MARGIN: f64 = 1e-14;

/// Seed of start `start` for a decomposition (splitmix64 over the inputs).
pub fn task_seed(rng_seed: u64, signature: &str, start: usize) -> u64 {
    fn mix(mut z: u64) -> u64 {
        z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }
    let mut h = mix(rng_seed);
    for b in signature.bytes() {
        h = mix(h ^ b as u64);
    }
    mix(h ^ start as u64)
}

struct StartOutcome {
    residual: f64,
    iterations: usize,
    rule: Option<QuadratureRule>,
}

fn admissible_rule(problem: &Problem, strength: usize, theta: &[Dd], w: &[Dd]) -> Option<QuadratureRule> {
    if w.iter().any(|v| !(v.to_f64() > MIN_WEIGHT)) {
        return None;
    }
    let kind = problem.kind();
    let mut orbits = Vec::with_capacity(problem.n_orbits());
    for o in 0..problem.n_orbits() {
        let fam = problem.families()[o];
        let params = clamp_params(&fam, problem.orbit_params(theta, o));
        orbits.push(OrbitWeight { orbit: OrbitInstance::new(fam, params).ok()?, weight: w[o] });
    }
    let rule = QuadratureRule::from_orbits(kind, strength, orbits, Provenance::Generated).ok()?;
    rule.validate().ok()?;
    let inside = rule.points().iter().all(|p| strictly_inside(kind, &p.map(|v| v.to_f64()), INTERIOR_MARGIN));
    inside.then_some(rule)
}

fn run_start(
    problem: &Problem,
    strength: usize,
    cfg: &SolveConfig,
    sig: &str,
    start: usize,
    best: &AtomicUsize,
) -> StartOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(task_seed(cfg.rng_seed, sig, start));
    let x0: Vec<f64> = problem.families().iter().flat_map(|f| sample_params(f, &mut rng)).collect();
    let cancel = || best.load(Ordering::Relaxed) < start;
    let out = levenberg_marquardt(problem, &x0, cfg, &cancel);
    let mut outcome = StartOutcome { residual: out.residual, iterations: out.iterations, rule: None };
    if out.residual <= POLISH_THRESHOLD && !cancel() {
        let (theta, w, r) = polish_extended(problem, &out.params, &out.weights, 1e-30, POLISH_ITERATIONS);
        outcome.residual = r.to_f64();
        if outcome.residual <= cfg.residual_tol {
            outcome.rule = admissible_rule(problem, strength, &theta, &w);
            if outcome.rule.is_some() {
                best.fetch_min(start, Ordering::Relaxed);
            }
        }
    }
    outcome
}

/// Runs every start of one decomposition.
pub fn search_decomposition(
    kind: ElementKind,
    strength: usize,
    decomposition: &Decomposition,
    cfg: &SolveConfig,
) -> Result<SearchResult> {
    cfg.validate()?;
    let problem = Problem::new(kind, strength, decomposition)?;
    let sig = decomposition_signature(decomposition)?;
    let best = AtomicUsize::new(usize::MAX);
    let outcomes: Vec<Option<StartOutcome>> = map_indexed(cfg.exec, cfg.n_starts, |i| {
        if best.load(Ordering::Relaxed) < i {
            return None;
        }
        Some(run_start(&problem, strength, cfg, &sig, i, &best))
    });
    let winner = outcomes.iter().position(|o| o.as_ref().is_some_and(|o| o.rule.is_some()));
    let result = match winner {
        Some(i) => {
            let o = outcomes[i].as_ref().unwrap();
            SearchResult {
                decomposition: decomposition.clone(),
                rule: o.rule.clone(),
                residual: o.residual,
                iterations_used: o.iterations,
                starts_used: i + 1,
            }
        }
        None => {
            let (res, its) = outcomes
                .iter()
                .flatten()
                .map(|o| (o.residual, o.iterations))
                .fold((f64::INFINITY, 0), |acc, x| if x.0 < acc.0 { x } else { acc });
            SearchResult {
                decomposition: decomposition.clone(),
                rule: None,
                residual: res,
                iterations_used: its,
                starts_used: cfg.n_starts,
            }
        }
    };
    log::info!(
        "decomp {sig} residual={:.3e} starts={} found={}",
        result.residual,
        result.starts_used,
        result.rule.is_some()
    );
    Ok(result)
}

/// Tries decompositions of `n_points` in free-parameter order until one
/// yields an admissible rule. Results are sorted by residual.
pub fn search(kind: ElementKind, strength: usize, n_points: usize, cfg: &SolveConfig) -> Result<Vec<SearchResult>> {
    cfg.validate()?;
    let n_eq = super::MomentSystem::get(kind, strength)?.n_equations();
    let mut results = Vec::new();
    for d in enumerate_decompositions(kind, n_points, 1)? {
        if cfg.skip_underdetermined && d.n_free_params < n_eq {
            continue;
        }
        let r = search_decomposition(kind, strength, &d, cfg)?;
        let done = r.rule.is_some();
        results.push(r);
        if done {
            break;
        }
    }
    results.sort_by(|a, b| a.residual.total_cmp(&b.residual));
    Ok(results)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeds_differ() {
        let a = task_seed(1, "S1^1", 0);
        assert_ne!(a, task_seed(1, "S1^1", 1));
        assert_ne!(a, task_seed(2, "S1^1", 0));
        assert_ne!(a, task_seed(1, "S2^1", 0));
        assert_eq!(a, task_seed(1, "S1^1", 0));
    }

    #[test]
    fn pentatope_five_points() {
        let cfg = SolveConfig { n_starts: 8, ..SolveConfig::default() };
        let res = search(ElementKind::Pentatope, 2, 5, &cfg).unwrap();
        let rule = res[0].rule.as_ref().expect("five-point rule");
        assert_eq!(rule.n_points(), 5);
        assert!(res[0].residual <= 1e-14);
    }
}
