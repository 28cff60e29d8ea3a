//! p-median with per-demand maximum distance limits.
//!
//! A demand point `i` may only be served by a site `j` with `d[i][j] <= s[i]`.
//! Every solver here opens exactly `p` sites and assigns each demand point to
//! its nearest open site; a solution is feasible when every such nearest site
//! lies within the demand's limit.

mod exact;
mod feasibility;
mod grasp;
mod lagrangian;
mod swap;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{param, Result};
use crate::primitives::{closest_assignment, DistanceMatrix};

pub use exact::{exact_solve, exact_solve_with, solve_pmp_exact, ExactOptions};
pub use feasibility::{feasibility_check, FeasibilityReport, PMin, Verdict, EXACT_COVER_MAX_SITES};
pub use grasp::{grasp_solve, GraspParams, Neighborhood};
pub use lagrangian::{lagrangian_bound, LagrangianParams, LagrangianResult, UpperBoundSource};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PMedianInstance {
    dm: DistanceMatrix,
    p: usize,
    s: Vec<f64>,
}

impl PMedianInstance {
    pub fn new(dm: DistanceMatrix, p: usize, s: Vec<f64>) -> Result<Self> {
        if p == 0 || p > dm.n_sites() {
            return param(format!("p must lie in 1..={}, got {p}", dm.n_sites()));
        }
        if s.len() != dm.n_demand() {
            return param(format!(
                "distance limit vector has {} entries, expected {}",
                s.len(),
                dm.n_demand()
            ));
        }
        if let Some(i) = s.iter().position(|v| v.is_nan() || *v < 0.0) {
            return param(format!("distance limit s[{i}] = {} is negative", s[i]));
        }
        Ok(Self { dm, p, s })
    }

    pub fn distances(&self) -> &DistanceMatrix {
        &self.dm
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn limits(&self) -> &[f64] {
        &self.s
    }

    pub fn n_demand(&self) -> usize {
        self.dm.n_demand()
    }

    pub fn n_sites(&self) -> usize {
        self.dm.n_sites()
    }

    /// Same distances and limits with a different facility count.
    pub fn with_p(&self, p: usize) -> Result<Self> {
        Self::new(self.dm.clone(), p, self.s.clone())
    }

    #[inline]
    pub fn covers(&self, demand: usize, site: usize) -> bool {
        self.dm.get(demand, site) <= self.s[demand]
    }

    /// `N_i`: the sites within the limit of demand `i`, ascending.
    pub fn coverage_set(&self, demand: usize) -> Vec<usize> {
        (0..self.n_sites())
            .filter(|&j| self.covers(demand, j))
            .collect()
    }

    pub fn coverage_sets(&self) -> Vec<Vec<usize>> {
        (0..self.n_demand()).map(|i| self.coverage_set(i)).collect()
    }

    pub(crate) fn is_integral(&self) -> bool {
        self.dm.rows().flatten().all(|d| d.fract() == 0.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocationSolution {
    /// Open sites, ascending.
    pub open: Vec<usize>,
    /// `assignment[i]` is the open site serving demand `i`.
    pub assignment: Vec<usize>,
    pub objective: f64,
    pub feasible: bool,
}

impl LocationSolution {
    /// Demand points whose assigned site lies beyond their limit.
    pub fn violations(&self, inst: &PMedianInstance) -> Vec<usize> {
        self.assignment
            .iter()
            .enumerate()
            .filter(|&(i, &j)| !inst.covers(i, j))
            .map(|(i, _)| i)
            .collect()
    }
}

/// Why no feasible solution was returned.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum InfeasibilityWitness {
    /// No site lies within the limit of this demand point, whatever `p` is.
    UncoverableDemand { demand: usize },
    /// Every covering site set has more than `p` sites. `p_min` is the exact
    /// minimum cover size when it was computed.
    CoverTooLarge { p: usize, p_min: Option<usize> },
    /// A heuristic gave up without proof either way.
    NoFeasibleFound { attempts: usize },
}

impl InfeasibilityWitness {
    pub fn is_proof(&self) -> bool {
        !matches!(self, Self::NoFeasibleFound { .. })
    }
}

impl fmt::Display for InfeasibilityWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::UncoverableDemand { demand } => {
                write!(f, "demand {demand} has no site within its distance limit")
            }
            Self::CoverTooLarge { p, p_min: Some(q) } => {
                write!(f, "minimum covering set has {q} sites > p = {p}")
            }
            Self::CoverTooLarge { p, p_min: None } => {
                write!(f, "no set of {p} sites covers every demand point")
            }
            Self::NoFeasibleFound { attempts } => {
                write!(f, "no feasible solution found in {attempts} attempts")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Outcome {
    Feasible(LocationSolution),
    Infeasible(InfeasibilityWitness),
}

impl Outcome {
    pub fn solution(&self) -> Option<&LocationSolution> {
        match self {
            Self::Feasible(s) => Some(s),
            Self::Infeasible(_) => None,
        }
    }

    pub fn objective(&self) -> Option<f64> {
        self.solution().map(|s| s.objective)
    }

    pub fn is_feasible(&self) -> bool {
        matches!(self, Self::Feasible(_))
    }
}

/// Assigns demand to the nearest of the `p` given sites and checks the limits.
pub fn evaluate(inst: &PMedianInstance, open: &[usize]) -> Result<LocationSolution> {
    let mut sorted = open.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != open.len() || open.len() != inst.p() {
        return param(format!(
            "open set must contain {} distinct sites, got {open:?}",
            inst.p()
        ));
    }
    let (assignment, objective) = closest_assignment(inst.distances(), &sorted)?;
    let feasible = assignment
        .iter()
        .enumerate()
        .all(|(i, &j)| inst.covers(i, j));
    Ok(LocationSolution {
        open: sorted,
        assignment,
        objective,
        feasible,
    })
}

/// Replaces every over-limit distance with `big_m`.
pub fn transform_distances(inst: &PMedianInstance, big_m: f64) -> Result<DistanceMatrix> {
    let max = inst.distances().max_entry();
    if !(big_m > max) || !big_m.is_finite() {
        return param(format!(
            "big-M {big_m} must exceed the largest distance {max}"
        ));
    }
    let data = inst
        .distances()
        .rows()
        .zip(inst.limits())
        .flat_map(|(row, &s)| row.iter().map(move |&d| if d <= s { d } else { big_m }))
        .collect();
    DistanceMatrix::new(inst.n_demand(), inst.n_sites(), data)
}

/// `1 + n_demand * max d`: one over-limit edge then costs more than any feasible assignment.
pub fn choose_big_m(inst: &PMedianInstance) -> f64 {
    1.0 + inst.n_demand() as f64 * inst.distances().max_entry()
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;

    /// Points 0, 1, 2, 10 on a line; sites coincide with demand points.
    pub fn line(p: usize, s: f64) -> PMedianInstance {
        let xs = [0.0f64, 1.0, 2.0, 10.0];
        let rows: Vec<Vec<f64>> = xs
            .iter()
            .map(|a| xs.iter().map(|b| (a - b).abs()).collect())
            .collect();
        PMedianInstance::new(DistanceMatrix::from_rows(&rows).unwrap(), p, vec![s; 4]).unwrap()
    }
}
