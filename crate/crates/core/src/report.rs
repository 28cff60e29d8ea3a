use std::time::Duration;

use serde::{Deserialize, Serialize};

/// Run statistics attached to every heuristic or bounding solver.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SolverReport {
    pub solver: String,
    pub lower_bound: Option<f64>,
    pub incumbent: Option<f64>,
    /// Relative gap `(incumbent - lower_bound) / max(|incumbent|, 1)`.
    pub gap: Option<f64>,
    pub iterations: usize,
    pub seed: Option<u64>,
    pub wall_time: Duration,
    /// Per-iteration best value: lower bound for bounding methods, incumbent for searches.
    pub trajectory: Vec<f64>,
    /// Set when no feasible solution was found.
    pub infeasible: bool,
}

impl SolverReport {
    pub(crate) fn new(solver: &str) -> Self {
        Self {
            solver: solver.to_string(),
            ..Self::default()
        }
    }

    pub(crate) fn update_gap(&mut self) {
        self.gap = match (self.lower_bound, self.incumbent) {
            (Some(lb), Some(ub)) => Some(relative_gap(ub, lb)),
            _ => None,
        };
    }

    /// Copy with the wall-clock time cleared, for reproducibility comparisons.
    pub fn without_timing(&self) -> Self {
        Self {
            wall_time: Duration::ZERO,
            ..self.clone()
        }
    }
}

pub(crate) fn relative_gap(upper: f64, lower: f64) -> f64 {
    (upper - lower) / upper.abs().max(1.0)
}
