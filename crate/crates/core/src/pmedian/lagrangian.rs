//! Lagrangian bound for the limit-constrained p-median.
//!
//! The "serve each demand exactly once" rows are dualized with free
//! multipliers `u`. Over-limit pairs stay forbidden, so the relaxed problem
//! splits by site: site `j` is worth `rho_j = sum_i min(0, d_ij - u_i)` over
//! the demand points it may serve, and the `p` sites with the smallest `rho`
//! open. `L(u) = sum_i u_i + sum of the p smallest rho_j` bounds the optimum
//! from below for every `u`.

use std::collections::HashSet;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{param, Result};
use crate::report::{relative_gap, SolverReport};

use super::grasp::{grasp_solve, GraspParams};
use super::swap::{repair_coverage, swap_local_search};
use super::{evaluate, LocationSolution, PMedianInstance};

/// Where the subgradient step takes its upper-bound target from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum UpperBoundSource {
    /// Only solutions repaired from the relaxed site choice.
    Repair,
    /// A GRASP run before the first iteration, plus repaired solutions.
    Grasp(GraspParams),
    /// A known objective value, plus repaired solutions.
    Given(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LagrangianParams {
    pub max_iters: usize,
    /// Step scale at the first iteration.
    pub initial_step_scale: f64,
    /// Non-improving iterations before the step scale halves.
    pub halving_patience: usize,
    /// Stop once the relative gap drops below this.
    pub gap_tolerance: f64,
    pub ub_source: UpperBoundSource,
}

impl Default for LagrangianParams {
    fn default() -> Self {
        Self {
            max_iters: 500,
            initial_step_scale: 2.0,
            halving_patience: 20,
            gap_tolerance: 1e-6,
            ub_source: UpperBoundSource::Repair,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LagrangianResult {
    pub lower_bound: f64,
    /// Best feasible solution met along the way, if any.
    pub incumbent: Option<LocationSolution>,
    pub report: SolverReport,
}

/// Subgradient ascent on `L(u)`. Each iteration also repairs the relaxed site
/// choice into a covering solution and polishes it with swaps, which supplies
/// the incumbent.
///
/// For instances with integral distances the bound is rounded up to the next
/// integer, since every objective value is integral.
pub fn lagrangian_bound(
    inst: &PMedianInstance,
    params: &LagrangianParams,
) -> Result<LagrangianResult> {
    if params.max_iters == 0 {
        return param("Lagrangian ascent needs max_iters >= 1");
    }
    if !(params.initial_step_scale > 0.0) {
        return param(format!(
            "initial step scale must be positive, got {}",
            params.initial_step_scale
        ));
    }
    let start = Instant::now();
    let mut report = SolverReport::new("lagrangian");
    let (n, m, p) = (inst.n_demand(), inst.n_sites(), inst.p());
    let dm = inst.distances();
    let integral = inst.is_integral();

    // (demand, distance) pairs each site may serve
    let mut servable: Vec<Vec<(usize, f64)>> = vec![Vec::new(); m];
    let mut u = vec![0.0; n];
    let mut ub_estimate = 0.0;
    for i in 0..n {
        let mut lo = f64::INFINITY;
        let mut hi: f64 = 0.0;
        for j in 0..m {
            if inst.covers(i, j) {
                let d = dm.get(i, j);
                servable[j].push((i, d));
                lo = lo.min(d);
                hi = hi.max(d);
            }
        }
        u[i] = if lo.is_finite() { lo } else { 0.0 };
        ub_estimate += hi;
    }

    let mut incumbent: Option<LocationSolution> = None;
    let mut given_ub = None;
    match params.ub_source {
        UpperBoundSource::Repair => {}
        UpperBoundSource::Grasp(g) => {
            let (out, _) = grasp_solve(inst, &g)?;
            incumbent = out.solution().cloned();
        }
        UpperBoundSource::Given(v) => given_ub = Some(v),
    }

    let mut step_scale = params.initial_step_scale;
    let mut best_lb = f64::NEG_INFINITY;
    let mut stall = 0;
    let mut seen: HashSet<Vec<usize>> = HashSet::new();
    let mut rho = vec![0.0; m];
    let mut order: Vec<usize> = (0..m).collect();
    let mut served = vec![0i32; n];

    for _ in 0..params.max_iters {
        report.iterations += 1;
        for (j, r) in rho.iter_mut().enumerate() {
            *r = servable[j].iter().map(|&(i, d)| (d - u[i]).min(0.0)).sum();
        }
        order.sort_by(|&a, &b| rho[a].total_cmp(&rho[b]).then(a.cmp(&b)));
        let chosen = &order[..p];
        let value: f64 = u.iter().sum::<f64>() + chosen.iter().map(|&j| rho[j]).sum::<f64>();
        let lb = if integral {
            (value - 1e-7 * value.abs().max(1.0)).ceil()
        } else {
            value
        };
        report.trajectory.push(lb);
        if lb > best_lb {
            best_lb = lb;
            stall = 0;
        } else {
            stall += 1;
            if stall >= params.halving_patience {
                step_scale /= 2.0;
                stall = 0;
            }
        }

        let mut open = chosen.to_vec();
        open.sort_unstable();
        if seen.insert(open.clone()) && repair_coverage(inst, &mut open) {
            swap_local_search(inst, &mut open);
            let sol = evaluate(inst, &open)?;
            if incumbent
                .as_ref()
                .is_none_or(|b| sol.objective < b.objective)
            {
                incumbent = Some(sol);
            }
        }

        let target = incumbent
            .as_ref()
            .map(|s| s.objective)
            .into_iter()
            .chain(given_ub)
            .fold(ub_estimate, f64::min);
        if incumbent.is_none() && best_lb > ub_estimate + 1e-9 * ub_estimate.max(1.0) {
            // the bound exceeds every possible feasible total
            break;
        }
        if incumbent.is_some() && relative_gap(target, best_lb) < params.gap_tolerance {
            break;
        }

        served.iter_mut().for_each(|c| *c = 1);
        for &j in chosen {
            for &(i, d) in &servable[j] {
                if d < u[i] {
                    served[i] -= 1;
                }
            }
        }
        let norm2: f64 = served.iter().map(|&g| f64::from(g * g)).sum();
        if norm2 == 0.0 {
            // relaxed solution serves everyone exactly once: it is optimal
            break;
        }
        let numerator = (target - value).max(1e-6 * value.abs().max(1.0));
        let theta = step_scale * numerator / norm2;
        for (ui, &g) in u.iter_mut().zip(&served) {
            *ui += theta * f64::from(g);
        }
        if step_scale < 1e-10 {
            break;
        }
    }

    report.wall_time = start.elapsed();
    report.lower_bound = Some(best_lb);
    report.incumbent = incumbent.as_ref().map(|s| s.objective);
    report.infeasible = incumbent.is_none();
    report.update_gap();
    Ok(LagrangianResult {
        lower_bound: best_lb,
        incumbent,
        report,
    })
}
