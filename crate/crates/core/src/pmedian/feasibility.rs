//! Feasibility as a hitting-set question: the instance is feasible for `p`
//! exactly when some `p` sites hit every coverage set `N_i`.

use serde::{Deserialize, Serialize};

use super::{InfeasibilityWitness, PMedianInstance};

/// Up to this many sites the minimum cover is found by enumeration.
pub const EXACT_COVER_MAX_SITES: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Feasible,
    Infeasible,
    /// Only bounds on the minimum cover are known and `p` lies between them.
    Undetermined,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PMin {
    Exact(usize),
    Bounds {
        lower: usize,
        upper: usize,
    },
    /// Some demand point cannot be covered at all.
    Unbounded,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeasibilityReport {
    pub verdict: Verdict,
    pub p_min: PMin,
    pub witness: Option<InfeasibilityWitness>,
}

impl FeasibilityReport {
    pub fn is_feasible(&self) -> bool {
        self.verdict == Verdict::Feasible
    }
}

pub fn feasibility_check(inst: &PMedianInstance) -> FeasibilityReport {
    let sets = inst.coverage_sets();
    if let Some(i) = sets.iter().position(Vec::is_empty) {
        return FeasibilityReport {
            verdict: Verdict::Infeasible,
            p_min: PMin::Unbounded,
            witness: Some(InfeasibilityWitness::UncoverableDemand { demand: i }),
        };
    }
    let p = inst.p();
    if inst.n_sites() <= EXACT_COVER_MAX_SITES {
        let q = min_cover_by_enumeration(&sets, inst.n_sites());
        let feasible = p >= q;
        return FeasibilityReport {
            verdict: if feasible {
                Verdict::Feasible
            } else {
                Verdict::Infeasible
            },
            p_min: PMin::Exact(q),
            witness: (!feasible)
                .then_some(InfeasibilityWitness::CoverTooLarge { p, p_min: Some(q) }),
        };
    }
    let upper = greedy_cover(&sets, inst.n_sites()).len();
    let lower = disjoint_packing(&sets, inst.n_sites());
    let (verdict, witness) = if p >= upper {
        (Verdict::Feasible, None)
    } else if p < lower {
        (
            Verdict::Infeasible,
            Some(InfeasibilityWitness::CoverTooLarge { p, p_min: None }),
        )
    } else {
        (Verdict::Undetermined, None)
    };
    FeasibilityReport {
        verdict,
        p_min: if lower == upper {
            PMin::Exact(lower)
        } else {
            PMin::Bounds { lower, upper }
        },
        witness,
    }
}

/// Exact minimum cover size for small site counts, `None` if some set is empty.
pub(crate) fn exact_min_cover(inst: &PMedianInstance) -> Option<usize> {
    let sets = inst.coverage_sets();
    if sets.iter().any(Vec::is_empty) {
        return None;
    }
    Some(min_cover_by_enumeration(&sets, inst.n_sites()))
}

fn min_cover_by_enumeration(sets: &[Vec<usize>], n_sites: usize) -> usize {
    assert!(n_sites <= EXACT_COVER_MAX_SITES);
    let mut masks: Vec<u32> = sets
        .iter()
        .map(|s| s.iter().fold(0u32, |acc, &j| acc | 1 << j))
        .collect();
    masks.sort_unstable_by_key(|m| (m.count_ones(), *m));
    masks.dedup();
    // hitting a subset also hits each of its supersets
    let mut reduced: Vec<u32> = Vec::new();
    for m in masks {
        if !reduced.iter().any(|r| r & m == *r) {
            reduced.push(m);
        }
    }

    let lower = disjoint_packing(sets, n_sites).max(1);
    for q in lower..=n_sites {
        let mut mask: u32 = (1u32 << q) - 1;
        let limit: u32 = 1u32 << n_sites;
        while mask < limit {
            if reduced.iter().all(|r| r & mask != 0) {
                return q;
            }
            // next mask with the same popcount
            let c = mask & mask.wrapping_neg();
            let r = mask + c;
            mask = (((r ^ mask) >> 2) / c) | r;
        }
    }
    n_sites
}

/// Repeatedly opens the site covering the most uncovered demand points.
pub(crate) fn greedy_cover(sets: &[Vec<usize>], n_sites: usize) -> Vec<usize> {
    let mut covered = vec![false; sets.len()];
    let mut by_site: Vec<Vec<usize>> = vec![Vec::new(); n_sites];
    for (i, s) in sets.iter().enumerate() {
        for &j in s {
            by_site[j].push(i);
        }
    }
    let mut chosen = Vec::new();
    while covered.iter().any(|c| !c) {
        let (best, gain) = by_site
            .iter()
            .enumerate()
            .map(|(j, ds)| (j, ds.iter().filter(|&&i| !covered[i]).count()))
            .fold((0, 0), |acc, cur| if cur.1 > acc.1 { cur } else { acc });
        if gain == 0 {
            break;
        }
        for &i in &by_site[best] {
            covered[i] = true;
        }
        chosen.push(best);
    }
    chosen.sort_unstable();
    chosen
}

/// Size of a greedily built family of pairwise disjoint coverage sets, a lower
/// bound on any cover: each set in the family needs its own site.
fn disjoint_packing(sets: &[Vec<usize>], n_sites: usize) -> usize {
    let mut order: Vec<usize> = (0..sets.len()).collect();
    order.sort_by_key(|&i| (sets[i].len(), i));
    let mut used = vec![false; n_sites];
    let mut count = 0;
    for i in order {
        if sets[i].iter().all(|&j| !used[j]) {
            for &j in &sets[i] {
                used[j] = true;
            }
            count += 1;
        }
    }
    count
}

#[cfg(test)]
mod tests {
    use super::super::fixtures::line;
    use super::*;
    use crate::primitives::DistanceMatrix;

    #[test]
    fn line_instance_p_min() {
        let r = feasibility_check(&line(2, 3.0));
        assert_eq!(r.p_min, PMin::Exact(2));
        assert!(r.is_feasible());
        assert_eq!(
            feasibility_check(&line(1, 3.0)).verdict,
            Verdict::Infeasible
        );

        let r = feasibility_check(&line(2, 0.5));
        assert_eq!(r.p_min, PMin::Exact(4));
        assert_eq!(r.verdict, Verdict::Infeasible);
        assert_eq!(
            r.witness,
            Some(InfeasibilityWitness::CoverTooLarge {
                p: 2,
                p_min: Some(4)
            })
        );
    }

    #[test]
    fn empty_coverage_set_is_infeasible_for_every_p() {
        let dm = DistanceMatrix::from_rows(&[vec![1.0, 2.0], vec![0.0, 5.0]]).unwrap();
        let inst = PMedianInstance::new(dm, 2, vec![0.5, 0.0]).unwrap();
        let r = feasibility_check(&inst);
        assert_eq!(r.p_min, PMin::Unbounded);
        assert_eq!(
            r.witness,
            Some(InfeasibilityWitness::UncoverableDemand { demand: 0 })
        );
    }

    #[test]
    fn bound_mode_brackets() {
        // 30 sites on a line, each demand covers itself and neighbours within 1
        let n = 30;
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|i| (0..n).map(|j| (i as f64 - j as f64).abs()).collect())
            .collect();
        let dm = DistanceMatrix::from_rows(&rows).unwrap();
        let inst = PMedianInstance::new(dm, 10, vec![1.0; n]).unwrap();
        let r = feasibility_check(&inst);
        // the optimum is 10 (every third point); greedy and packing both reach it here
        match r.p_min {
            PMin::Exact(q) => assert_eq!(q, 10),
            PMin::Bounds { lower, upper } => assert!(lower <= 10 && 10 <= upper),
            PMin::Unbounded => panic!(),
        }
        assert_ne!(r.verdict, Verdict::Infeasible);
        let r = feasibility_check(&inst.with_p(3).unwrap());
        assert_eq!(r.verdict, Verdict::Infeasible);
    }

    #[test]
    fn greedy_cover_hits_everything() {
        let sets = vec![vec![0, 1], vec![1, 2], vec![3]];
        let cover = greedy_cover(&sets, 4);
        assert!(sets.iter().all(|s| s.iter().any(|j| cover.contains(j))));
        assert_eq!(disjoint_packing(&sets, 4), 2);
    }
}
