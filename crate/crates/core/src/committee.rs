//! Approval-voting committee elections under the k-centrum criterion.
//!
//! A committee is a 0/1 vector over the candidates; voter `i` is at Hamming
//! distance `d_i(x)` from it. The k-centrum objective sums the `k` largest
//! distances, so `k = 1` is the minimax rule and `k = n` the minisum rule.
//! Committees are unconstrained in size unless [`CommitteeProblem::size`] is set.
//! Ties between optimal committees go to the lexicographically smallest bit-string.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{param, Error, Result};
use crate::primitives::{hamming, k_centrum_counts, ApprovalProfile, Committee};

/// Exhaustive search handles at most this many candidates (`2^22` committees).
pub const MAX_EXACT_CANDIDATES: usize = 22;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CommitteeProblem {
    profile: ApprovalProfile,
    k: usize,
    size: Option<usize>,
}

impl CommitteeProblem {
    pub fn new(profile: ApprovalProfile, k: usize) -> Result<Self> {
        if k == 0 || k > profile.n_voters() {
            return param(format!("k must lie in 1..={}, got {k}", profile.n_voters()));
        }
        Ok(Self {
            profile,
            k,
            size: None,
        })
    }

    /// Restricts feasible committees to exactly `size` members.
    pub fn with_size(mut self, size: usize) -> Result<Self> {
        if size > self.profile.m_candidates() {
            return param(format!(
                "committee size {size} exceeds {} candidates",
                self.profile.m_candidates()
            ));
        }
        self.size = Some(size);
        Ok(self)
    }

    pub fn profile(&self) -> &ApprovalProfile {
        &self.profile
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn size(&self) -> Option<usize> {
        self.size
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CommitteeSolution {
    pub committee: Committee,
    pub objective: usize,
    /// Hamming distance from each voter's ballot.
    pub distances: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Strategy {
    /// Enumerate every committee.
    Exact,
    /// Multi-start steepest descent over bit flips and in/out swaps.
    Heuristic { starts: usize, seed: u64 },
}

impl Strategy {
    pub fn heuristic(seed: u64) -> Self {
        Self::Heuristic { starts: 32, seed }
    }
}

pub fn objective_value(prob: &CommitteeProblem, x: &Committee) -> Result<usize> {
    let distances = voter_distances(&prob.profile, x)?;
    Ok(top_k_sum(&distances, prob.k))
}

fn voter_distances(profile: &ApprovalProfile, x: &Committee) -> Result<Vec<usize>> {
    profile.rows().iter().map(|r| hamming(r, x)).collect()
}

fn top_k_sum(distances: &[usize], k: usize) -> usize {
    let mut sorted = distances.to_vec();
    sorted.sort_unstable_by(|a, b| b.cmp(a));
    sorted[..k].iter().sum()
}

fn solution(prob: &CommitteeProblem, committee: Committee) -> CommitteeSolution {
    let distances = voter_distances(&prob.profile, &committee).expect("committee length matches");
    let objective = top_k_sum(&distances, prob.k);
    CommitteeSolution {
        committee,
        objective,
        distances,
    }
}

/// Majority rule: candidate `j` is elected iff more than half the voters approve.
/// Exactly half leaves the candidate out.
pub fn minisum_solve(profile: &ApprovalProfile) -> CommitteeSolution {
    let n = profile.n_voters();
    let bits = (0..profile.m_candidates())
        .map(|j| 2 * profile.approvals(j) > n)
        .collect();
    let prob = CommitteeProblem::new(profile.clone(), n).expect("k = n is in range");
    solution(&prob, Committee::new(bits))
}

pub fn minimax_solve(profile: &ApprovalProfile, strategy: Strategy) -> Result<CommitteeSolution> {
    let prob = CommitteeProblem::new(profile.clone(), 1)?;
    k_centrum_solve(&prob, strategy)
}

pub fn k_centrum_solve(prob: &CommitteeProblem, strategy: Strategy) -> Result<CommitteeSolution> {
    match strategy {
        Strategy::Exact => exact(prob),
        Strategy::Heuristic { starts, seed } => heuristic(prob, starts, seed),
    }
}

fn exact(prob: &CommitteeProblem) -> Result<CommitteeSolution> {
    let m = prob.profile.m_candidates();
    if m > MAX_EXACT_CANDIDATES {
        return Err(Error::Budget {
            needed: 1u128 << m,
            budget: 1u128 << MAX_EXACT_CANDIDATES,
        });
    }
    let rows = prob.profile.packed_rows();
    let mut dist = vec![0u32; rows.len()];
    let mut hist = Vec::new();
    let mut best: Option<(u64, u32)> = None;
    // ascending masks visit committees in lexicographic order
    for mask in 0..(1u64 << m) {
        if prob.size.is_some_and(|s| mask.count_ones() as usize != s) {
            continue;
        }
        for (d, r) in dist.iter_mut().zip(&rows) {
            *d = (r ^ mask).count_ones();
        }
        let value = k_centrum_counts(&dist, prob.k, &mut hist);
        if best.is_none_or(|(_, b)| value < b) {
            best = Some((mask, value));
            if value == 0 {
                break;
            }
        }
    }
    let (mask, _) = best.expect("at least one committee is enumerated");
    Ok(solution(prob, Committee::from_packed(mask, m)))
}

fn heuristic(prob: &CommitteeProblem, starts: usize, seed: u64) -> Result<CommitteeSolution> {
    if starts == 0 {
        return param("heuristic needs at least one start");
    }
    let m = prob.profile.m_candidates();
    let mut best: Option<CommitteeSolution> = None;
    for s in 0..starts {
        let start = if s == 0 {
            seed_committee(prob)
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(s as u64);
            random_committee(m, prob.size, &mut rng)
        };
        let local = descend(prob, start);
        let better = match &best {
            None => true,
            Some(b) => {
                local.objective < b.objective
                    || (local.objective == b.objective && local.committee < b.committee)
            }
        };
        if better {
            best = Some(local);
        }
    }
    Ok(best.expect("starts >= 1"))
}

/// Majority committee, or the `size` most approved candidates when the size is fixed.
fn seed_committee(prob: &CommitteeProblem) -> Committee {
    let profile = &prob.profile;
    match prob.size {
        None => minisum_solve(profile).committee,
        Some(size) => {
            let mut order: Vec<usize> = (0..profile.m_candidates()).collect();
            order.sort_by_key(|&j| (std::cmp::Reverse(profile.approvals(j)), j));
            let mut bits = vec![false; profile.m_candidates()];
            for &j in &order[..size] {
                bits[j] = true;
            }
            Committee::new(bits)
        }
    }
}

fn random_committee(m: usize, size: Option<usize>, rng: &mut ChaCha8Rng) -> Committee {
    match size {
        None => Committee::new((0..m).map(|_| rng.random_bool(0.5)).collect()),
        Some(size) => {
            let mut idx: Vec<usize> = (0..m).collect();
            // partial Fisher-Yates
            for i in 0..size {
                let j = rng.random_range(i..m);
                idx.swap(i, j);
            }
            let mut bits = vec![false; m];
            for &j in &idx[..size] {
                bits[j] = true;
            }
            Committee::new(bits)
        }
    }
}

/// Steepest descent: flips (free size only) then swaps, best strict improvement,
/// ties to the first neighbour in that order.
fn descend(prob: &CommitteeProblem, start: Committee) -> CommitteeSolution {
    let profile = &prob.profile;
    let (n, m, k) = (profile.n_voters(), profile.m_candidates(), prob.k);
    let mut bits = start.bits().to_vec();
    let mut dist: Vec<u32> = voter_distances(profile, &start)
        .expect("lengths match")
        .into_iter()
        .map(|d| d as u32)
        .collect();
    let mut hist = Vec::new();
    let mut current = k_centrum_counts(&dist, k, &mut hist);
    let mut trial = vec![0u32; n];

    // flipping candidate j moves voter i one step closer iff they disagree on j
    let delta = |i: usize, j: usize, bits: &[bool]| -> i32 {
        if profile.row(i)[j] == bits[j] {
            1
        } else {
            -1
        }
    };

    loop {
        let mut best_move: Option<(u32, usize, Option<usize>)> = None;
        if prob.size.is_none() {
            for j in 0..m {
                for i in 0..n {
                    trial[i] = (dist[i] as i32 + delta(i, j, &bits)) as u32;
                }
                let v = k_centrum_counts(&trial, k, &mut hist);
                if v < current && best_move.is_none_or(|(b, _, _)| v < b) {
                    best_move = Some((v, j, None));
                }
            }
        }
        for out in (0..m).filter(|&j| bits[j]) {
            for inn in (0..m).filter(|&j| !bits[j]) {
                for i in 0..n {
                    trial[i] =
                        (dist[i] as i32 + delta(i, out, &bits) + delta(i, inn, &bits)) as u32;
                }
                let v = k_centrum_counts(&trial, k, &mut hist);
                if v < current && best_move.is_none_or(|(b, _, _)| v < b) {
                    best_move = Some((v, out, Some(inn)));
                }
            }
        }
        let Some((v, a, b)) = best_move else { break };
        for (i, d) in dist.iter_mut().enumerate() {
            let mut nd = *d as i32 + delta(i, a, &bits);
            if let Some(b) = b {
                nd += delta(i, b, &bits);
            }
            *d = nd as u32;
        }
        bits[a] = !bits[a];
        if let Some(b) = b {
            bits[b] = !bits[b];
        }
        current = v;
    }
    solution(prob, Committee::new(bits))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> ApprovalProfile {
        ApprovalProfile::from_bit_strings(&["111", "100", "000"]).unwrap()
    }

    fn c(s: &str) -> Committee {
        Committee::parse(s).unwrap()
    }

    #[test]
    fn objective_examples() {
        let prob = CommitteeProblem::new(q(), 3).unwrap();
        assert_eq!(objective_value(&prob, &c("100")).unwrap(), 3);
        let prob = CommitteeProblem::new(q(), 1).unwrap();
        assert_eq!(objective_value(&prob, &c("100")).unwrap(), 2);
        assert!(objective_value(&prob, &c("10")).is_err());

        let single = ApprovalProfile::from_bit_strings(&["111"]).unwrap();
        let prob = CommitteeProblem::new(single, 1).unwrap();
        assert_eq!(objective_value(&prob, &c("111")).unwrap(), 0);
    }

    #[test]
    fn minisum_examples() {
        let sol = minisum_solve(&q());
        assert_eq!(sol.committee, c("100"));
        assert_eq!(sol.objective, 3);
        assert_eq!(sol.distances, vec![2, 0, 1]);

        let same = ApprovalProfile::from_bit_strings(&["0110", "0110"]).unwrap();
        let sol = minisum_solve(&same);
        assert_eq!((sol.committee, sol.objective), (c("0110"), 0));

        let split = ApprovalProfile::from_bit_strings(&["10", "01"]).unwrap();
        let sol = minisum_solve(&split);
        assert_eq!((sol.committee, sol.objective), (c("00"), 2));
    }

    #[test]
    fn minimax_examples() {
        // 001, 010, 100, 101 and 110 all reach 2; the smallest bit-string wins
        let sol = minimax_solve(&q(), Strategy::Exact).unwrap();
        assert_eq!((sol.committee.clone(), sol.objective), (c("001"), 2));
        let prob = CommitteeProblem::new(q(), 1).unwrap();
        assert_eq!(objective_value(&prob, &c("100")).unwrap(), 2);
        let sol = minimax_solve(&q(), Strategy::heuristic(3)).unwrap();
        assert_eq!(sol.objective, 2);

        let one = ApprovalProfile::from_bit_strings(&["1011"]).unwrap();
        let sol = minimax_solve(&one, Strategy::Exact).unwrap();
        assert_eq!((sol.committee, sol.objective), (c("1011"), 0));
    }

    #[test]
    fn k_centrum_examples() {
        for (k, obj, winner) in [(1, 2, "001"), (2, 3, "100"), (3, 3, "100")] {
            let prob = CommitteeProblem::new(q(), k).unwrap();
            let sol = k_centrum_solve(&prob, Strategy::Exact).unwrap();
            assert_eq!(sol.committee, c(winner), "k={k}");
            assert_eq!(sol.objective, obj, "k={k}");
            assert_eq!(objective_value(&prob, &c("100")).unwrap(), obj, "k={k}");
        }
    }

    #[test]
    fn fixed_size_variant() {
        let prob = CommitteeProblem::new(q(), 3).unwrap().with_size(2).unwrap();
        let sol = k_centrum_solve(&prob, Strategy::Exact).unwrap();
        assert_eq!(sol.committee.size(), 2);
        // 110 and 101 both give distances (1, 1, 2)
        assert_eq!((sol.committee, sol.objective), (c("101"), 4));
        let h = k_centrum_solve(&prob, Strategy::heuristic(1)).unwrap();
        assert_eq!(h.committee.size(), 2);
        assert_eq!(h.objective, 4);
        assert!(CommitteeProblem::new(q(), 3).unwrap().with_size(4).is_err());
    }

    #[test]
    fn budget_and_parameter_errors() {
        let wide = ApprovalProfile::new(vec![vec![true; 23]]).unwrap();
        let prob = CommitteeProblem::new(wide, 1).unwrap();
        assert!(matches!(
            k_centrum_solve(&prob, Strategy::Exact),
            Err(Error::Budget { .. })
        ));
        // the heuristic has no budget
        let sol = k_centrum_solve(&prob, Strategy::heuristic(0)).unwrap();
        assert_eq!(sol.objective, 0);
        assert!(CommitteeProblem::new(q(), 0).is_err());
        assert!(CommitteeProblem::new(q(), 4).is_err());
        let prob = CommitteeProblem::new(q(), 1).unwrap();
        assert!(k_centrum_solve(&prob, Strategy::Heuristic { starts: 0, seed: 0 }).is_err());
    }

    #[test]
    fn solution_invariants_hold() {
        let prob = CommitteeProblem::new(q(), 2).unwrap();
        for strategy in [Strategy::Exact, Strategy::heuristic(9)] {
            let sol = k_centrum_solve(&prob, strategy).unwrap();
            let fresh = voter_distances(prob.profile(), &sol.committee).unwrap();
            assert_eq!(sol.distances, fresh);
            let as_f64: Vec<f64> = fresh.iter().map(|&d| d as f64).collect();
            let agg = crate::primitives::k_centrum_aggregate(&as_f64, 2).unwrap();
            assert_eq!(sol.objective as f64, agg);
        }
    }
}
