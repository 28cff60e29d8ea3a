//! Plain enumeration references, kept deliberately naive so they share no
//! logic with the solvers they check. Exponential; for small instances only.

use crate::committee::CommitteeProblem;
use crate::pmedian::PMedianInstance;
use crate::primitives::{Committee, DistanceMatrix};

/// Calls `f` on every `p`-subset of `0..m` in lexicographic order.
pub fn for_each_subset(m: usize, p: usize, mut f: impl FnMut(&[usize])) {
    if p > m {
        return;
    }
    let mut idx: Vec<usize> = (0..p).collect();
    loop {
        f(&idx);
        let Some(i) = (0..p).rev().find(|&i| idx[i] < m - p + i) else {
            return;
        };
        idx[i] += 1;
        for j in i + 1..p {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

fn assignment_cost(dm: &DistanceMatrix, limits: Option<&[f64]>, open: &[usize]) -> Option<f64> {
    let mut total = 0.0;
    for i in 0..dm.n_demand() {
        let best = open
            .iter()
            .map(|&j| dm.get(i, j))
            .fold(f64::INFINITY, f64::min);
        if limits.is_some_and(|s| best > s[i]) {
            return None;
        }
        total += best;
    }
    Some(total)
}

/// Best feasible open set and its objective; the lexicographically first
/// set wins ties. `None` when no `p`-set is feasible.
pub fn brute_force_pmpdc(inst: &PMedianInstance) -> Option<(Vec<usize>, f64)> {
    let mut best: Option<(Vec<usize>, f64)> = None;
    for_each_subset(inst.n_sites(), inst.p(), |open| {
        if let Some(cost) = assignment_cost(inst.distances(), Some(inst.limits()), open) {
            if best.as_ref().is_none_or(|(_, b)| cost < *b) {
                best = Some((open.to_vec(), cost));
            }
        }
    });
    best
}

/// Unconstrained p-median optimum.
pub fn brute_force_pmp(dm: &DistanceMatrix, p: usize) -> Option<(Vec<usize>, f64)> {
    let mut best: Option<(Vec<usize>, f64)> = None;
    for_each_subset(dm.n_sites(), p, |open| {
        let cost = assignment_cost(dm, None, open).expect("unconstrained");
        if best.as_ref().is_none_or(|(_, b)| cost < *b) {
            best = Some((open.to_vec(), cost));
        }
    });
    best
}

/// Smallest number of sites that leaves every demand within its limit.
pub fn brute_force_p_min(inst: &PMedianInstance) -> Option<usize> {
    (1..=inst.n_sites()).find(|&p| {
        let mut found = false;
        for_each_subset(inst.n_sites(), p, |open| {
            found |=
                !found && assignment_cost(inst.distances(), Some(inst.limits()), open).is_some();
        });
        found
    })
}

/// Best committee over all `2^m` candidates, honouring a fixed size if set;
/// the lexicographically smallest bit-string wins ties.
pub fn brute_force_committee(prob: &CommitteeProblem) -> (Committee, usize) {
    let profile = prob.profile();
    let m = profile.m_candidates();
    assert!(m < 30, "brute force over 2^{m} committees");
    let mut best: Option<(Committee, usize)> = None;
    for code in 0u32..(1 << m) {
        // bit m-1-j of `code` is candidate j, so counting up walks bit-strings in order
        let bits: Vec<bool> = (0..m).map(|j| code >> (m - 1 - j) & 1 == 1).collect();
        if prob
            .size()
            .is_some_and(|s| bits.iter().filter(|&&b| b).count() != s)
        {
            continue;
        }
        let mut d: Vec<usize> = profile
            .rows()
            .iter()
            .map(|r| r.iter().zip(&bits).filter(|(a, b)| a != b).count())
            .collect();
        d.sort_unstable_by(|a, b| b.cmp(a));
        let value: usize = d[..prob.k()].iter().sum();
        if best.as_ref().is_none_or(|(_, b)| value < *b) {
            best = Some((Committee::new(bits), value));
        }
    }
    best.expect("at least one committee")
}
