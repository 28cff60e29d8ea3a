use crate::error::{Error, Result};
use crate::primitives::DistanceMatrix;

use super::feasibility::{exact_min_cover, EXACT_COVER_MAX_SITES};
use super::{evaluate, InfeasibilityWitness, LocationSolution, Outcome, PMedianInstance};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExactOptions {
    /// Largest number of candidate site sets `C(n_sites, p)` the solver will accept.
    pub budget: u128,
    /// Below this many candidate sets every set is evaluated without bounding.
    pub enumeration_threshold: u128,
}

impl Default for ExactOptions {
    fn default() -> Self {
        Self {
            budget: 10_000_000,
            enumeration_threshold: 10_000,
        }
    }
}

pub(crate) fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = match acc.checked_mul((n - i) as u128) {
            Some(v) => v / (i as u128 + 1),
            None => return u128::MAX,
        };
    }
    acc
}

pub fn exact_solve(inst: &PMedianInstance) -> Result<Outcome> {
    exact_solve_with(inst, &ExactOptions::default())
}

/// Minimum-objective feasible open set, ties broken towards the
/// lexicographically smallest sorted site list.
pub fn exact_solve_with(inst: &PMedianInstance, opts: &ExactOptions) -> Result<Outcome> {
    if let Some(i) = (0..inst.n_demand()).find(|&i| (0..inst.n_sites()).all(|j| !inst.covers(i, j)))
    {
        return Ok(Outcome::Infeasible(
            InfeasibilityWitness::UncoverableDemand { demand: i },
        ));
    }
    if inst.p() == inst.n_sites() {
        let all: Vec<usize> = (0..inst.n_sites()).collect();
        // every demand has a site in range, so opening everything is feasible
        return evaluate(inst, &all).map(Outcome::Feasible);
    }

    let needed = binomial(inst.n_sites(), inst.p());
    if needed > opts.budget {
        return Err(Error::Budget {
            needed,
            budget: opts.budget,
        });
    }
    let prune = needed >= opts.enumeration_threshold;
    match Search::run(inst.distances(), Some(inst.limits()), inst.p(), prune) {
        Some(open) => evaluate(inst, &open).map(Outcome::Feasible),
        None => {
            let p_min = if inst.n_sites() <= EXACT_COVER_MAX_SITES {
                exact_min_cover(inst)
            } else {
                None
            };
            Ok(Outcome::Infeasible(InfeasibilityWitness::CoverTooLarge {
                p: inst.p(),
                p_min,
            }))
        }
    }
}

/// Exact classical p-median (no distance limits) on an arbitrary matrix.
pub fn solve_pmp_exact(
    dm: &DistanceMatrix,
    p: usize,
    opts: &ExactOptions,
) -> Result<LocationSolution> {
    if p == 0 || p > dm.n_sites() {
        return Err(Error::Parameter(format!(
            "p must lie in 1..={}, got {p}",
            dm.n_sites()
        )));
    }
    let needed = binomial(dm.n_sites(), p);
    if needed > opts.budget {
        return Err(Error::Budget {
            needed,
            budget: opts.budget,
        });
    }
    let prune = needed >= opts.enumeration_threshold;
    let open =
        Search::run(dm, None, p, prune).expect("unconstrained p-median always has a solution");
    let (assignment, objective) = crate::primitives::closest_assignment(dm, &open)?;
    Ok(LocationSolution {
        open,
        assignment,
        objective,
        feasible: true,
    })
}

/// Depth-first search over sorted site lists. Children are visited in
/// increasing site order, so the first optimum reached is the
/// lexicographically smallest.
struct Search<'a> {
    dm: &'a DistanceMatrix,
    limits: Option<&'a [f64]>,
    p: usize,
    prune: bool,
    /// `suffix[i * (m + 1) + j]`: smallest allowed distance from demand `i` to a site `>= j`.
    suffix: Vec<f64>,
    /// `levels[depth][i]`: smallest allowed distance from demand `i` to a chosen site.
    levels: Vec<Vec<f64>>,
    chosen: Vec<usize>,
    best: Option<(Vec<usize>, f64)>,
}

impl<'a> Search<'a> {
    fn run(
        dm: &'a DistanceMatrix,
        limits: Option<&'a [f64]>,
        p: usize,
        prune: bool,
    ) -> Option<Vec<usize>> {
        let (n, m) = (dm.n_demand(), dm.n_sites());
        let mut search = Search {
            dm,
            limits,
            p,
            prune,
            suffix: vec![f64::INFINITY; n * (m + 1)],
            levels: vec![vec![f64::INFINITY; n]; p + 1],
            chosen: Vec::with_capacity(p),
            best: None,
        };
        for i in 0..n {
            for j in (0..m).rev() {
                let v = search.allowed(i, j).min(search.suffix[i * (m + 1) + j + 1]);
                search.suffix[i * (m + 1) + j] = v;
            }
        }
        search.dfs(0);
        search.best.map(|(open, _)| open)
    }

    #[inline]
    fn allowed(&self, i: usize, j: usize) -> f64 {
        let d = self.dm.get(i, j);
        match self.limits {
            Some(s) if d > s[i] => f64::INFINITY,
            _ => d,
        }
    }

    fn dfs(&mut self, next: usize) {
        let depth = self.chosen.len();
        let m = self.dm.n_sites();
        if depth == self.p {
            let cur = &self.levels[depth];
            if cur.iter().all(|v| v.is_finite()) {
                let total: f64 = cur.iter().sum();
                if self.best.as_ref().is_none_or(|(_, b)| total < *b) {
                    self.best = Some((self.chosen.clone(), total));
                }
            }
            return;
        }
        if self.prune {
            let cur = &self.levels[depth];
            let mut bound = 0.0;
            for (i, &c) in cur.iter().enumerate() {
                let v = c.min(self.suffix[i * (m + 1) + next]);
                if !v.is_finite() {
                    return;
                }
                bound += v;
            }
            if let Some((_, best)) = &self.best {
                if bound > best + 1e-9 * best.abs().max(1.0) {
                    return;
                }
            }
        }
        let need = self.p - depth;
        for j in next..=m - need {
            let (lo, hi) = self.levels.split_at_mut(depth + 1);
            for (i, (child, &parent)) in hi[0].iter_mut().zip(&lo[depth]).enumerate() {
                let d = self.dm.get(i, j);
                let d = match self.limits {
                    Some(s) if d > s[i] => f64::INFINITY,
                    _ => d,
                };
                *child = parent.min(d);
            }
            self.chosen.push(j);
            self.dfs(j + 1);
            self.chosen.pop();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::fixtures::line;
    use super::*;

    #[test]
    fn binomials() {
        assert_eq!(binomial(4, 2), 6);
        assert_eq!(binomial(20, 10), 184_756);
        assert_eq!(binomial(3, 5), 0);
        assert_eq!(binomial(1000, 500), u128::MAX);
    }

    #[test]
    fn line_instance_optimum() {
        let out = exact_solve(&line(2, 3.0)).unwrap();
        let sol = out.solution().unwrap();
        assert_eq!(sol.open, vec![1, 3]);
        assert_eq!(sol.objective, 2.0);
    }

    #[test]
    fn line_instance_tight_limits_infeasible() {
        let out = exact_solve(&line(2, 0.5)).unwrap();
        assert_eq!(
            out,
            Outcome::Infeasible(InfeasibilityWitness::CoverTooLarge {
                p: 2,
                p_min: Some(4)
            })
        );
    }

    #[test]
    fn all_sites_open() {
        let sol = exact_solve(&line(4, 0.0)).unwrap();
        assert_eq!(sol.objective(), Some(0.0));
        assert_eq!(sol.solution().unwrap().open, vec![0, 1, 2, 3]);
    }

    #[test]
    fn pruned_and_plain_agree() {
        let inst = line(2, 3.0);
        let pruned = ExactOptions {
            enumeration_threshold: 0,
            ..Default::default()
        };
        assert_eq!(
            exact_solve_with(&inst, &pruned).unwrap(),
            exact_solve(&inst).unwrap()
        );
    }

    #[test]
    fn budget_error() {
        let opts = ExactOptions {
            budget: 5,
            ..Default::default()
        };
        assert!(matches!(
            exact_solve_with(&line(2, 3.0), &opts),
            Err(Error::Budget {
                needed: 6,
                budget: 5
            })
        ));
    }

    #[test]
    fn plain_pmp() {
        let inst = line(1, 0.0);
        let sol = solve_pmp_exact(inst.distances(), 1, &ExactOptions::default()).unwrap();
        // total distance from site 1 is 1 + 0 + 1 + 9 = 11; site 2 gives 2 + 1 + 0 + 8 = 11
        assert_eq!(sol.open, vec![1]);
        assert_eq!(sol.objective, 11.0);
    }
}
