use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{param, Result};
use crate::report::SolverReport;

use super::feasibility::feasibility_check;
use super::swap::{repair_coverage, swap_local_search};
use super::{evaluate, InfeasibilityWitness, LocationSolution, Outcome, PMedianInstance};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Neighborhood {
    /// Close one open site and open one closed site.
    Swap,
    /// Construction only.
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GraspParams {
    pub iterations: usize,
    /// Restricted candidate list width as a fraction of the cost range, in `[0, 1]`.
    pub rcl_alpha: f64,
    pub seed: u64,
    pub neighborhood: Neighborhood,
}

impl Default for GraspParams {
    fn default() -> Self {
        Self {
            iterations: 50,
            rcl_alpha: 0.15,
            seed: 0,
            neighborhood: Neighborhood::Swap,
        }
    }
}

/// Randomized greedy construction with a coverage-first candidate filter,
/// coverage repair, then swap descent; the best feasible result over all
/// iterations is kept.
///
/// Iteration `t` draws from its own ChaCha stream `t` under `seed`, so a run
/// with more iterations replays every iteration of a shorter run.
pub fn grasp_solve(
    inst: &PMedianInstance,
    params: &GraspParams,
) -> Result<(Outcome, SolverReport)> {
    if params.iterations == 0 {
        return param("GRASP needs at least one iteration");
    }
    if !(0.0..=1.0).contains(&params.rcl_alpha) {
        return param(format!(
            "rcl_alpha must lie in [0, 1], got {}",
            params.rcl_alpha
        ));
    }
    let start = Instant::now();
    let mut report = SolverReport::new("grasp");
    report.seed = Some(params.seed);

    let mut best: Option<LocationSolution> = None;
    for t in 0..params.iterations {
        let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
        rng.set_stream(t as u64);

        let mut open = construct(inst, params.rcl_alpha, &mut rng);
        if repair_coverage(inst, &mut open) {
            if params.neighborhood == Neighborhood::Swap {
                swap_local_search(inst, &mut open);
            }
            let sol = evaluate(inst, &open)?;
            debug_assert!(sol.feasible);
            if best.as_ref().is_none_or(|b| sol.objective < b.objective) {
                best = Some(sol);
            }
        }
        report.iterations += 1;
        report
            .trajectory
            .push(best.as_ref().map_or(f64::INFINITY, |b| b.objective));
    }

    report.wall_time = start.elapsed();
    let outcome =
        match best {
            Some(sol) => {
                report.incumbent = Some(sol.objective);
                Outcome::Feasible(sol)
            }
            None => {
                report.infeasible = true;
                let check = feasibility_check(inst);
                Outcome::Infeasible(check.witness.unwrap_or(
                    InfeasibilityWitness::NoFeasibleFound {
                        attempts: params.iterations,
                    },
                ))
            }
        };
    Ok((outcome, report))
}

/// Adds sites one at a time. While some uncovered demand point can still be
/// covered, only sites covering the largest number of them are candidates.
/// Among candidates the restricted list holds those whose resulting total is
/// within `alpha` of the cost range above the cheapest.
fn construct(inst: &PMedianInstance, alpha: f64, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let (n, m) = (inst.n_demand(), inst.n_sites());
    let dm = inst.distances();
    let s = inst.limits();
    let mut nearest = vec![f64::INFINITY; n];
    let mut is_open = vec![false; m];
    let mut open = Vec::with_capacity(inst.p());

    let mut scored: Vec<(usize, usize, f64)> = Vec::with_capacity(m);
    while open.len() < inst.p() {
        scored.clear();
        for j in (0..m).filter(|&j| !is_open[j]) {
            let mut gain = 0;
            let mut cost = 0.0;
            for i in 0..n {
                let d = dm.get(i, j);
                if nearest[i] > s[i] && d <= s[i] {
                    gain += 1;
                }
                cost += nearest[i].min(d);
            }
            scored.push((j, gain, cost));
        }
        let max_gain = scored.iter().map(|c| c.1).max().unwrap_or(0);
        if max_gain > 0 {
            scored.retain(|c| c.1 == max_gain);
        }
        let lo = scored.iter().map(|c| c.2).fold(f64::INFINITY, f64::min);
        let hi = scored.iter().map(|c| c.2).fold(f64::NEG_INFINITY, f64::max);
        let threshold = lo + alpha * (hi - lo);
        scored.retain(|c| c.2 <= threshold);

        let (j, _, _) = scored[rng.random_range(0..scored.len())];
        is_open[j] = true;
        open.push(j);
        for (i, near) in nearest.iter_mut().enumerate() {
            *near = near.min(dm.get(i, j));
        }
    }
    open.sort_unstable();
    open
}
