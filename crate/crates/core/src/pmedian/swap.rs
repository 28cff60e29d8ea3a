//! Swap moves (close one open site, open one closed site) shared by the
//! Lagrangian repair step and the GRASP local search.

use super::PMedianInstance;

/// Nearest and second-nearest open distances per demand point.
struct Nearest {
    d1: Vec<f64>,
    site1: Vec<usize>,
    d2: Vec<f64>,
}

impl Nearest {
    fn new(inst: &PMedianInstance, open: &[usize]) -> Self {
        let n = inst.n_demand();
        let mut d1 = vec![f64::INFINITY; n];
        let mut site1 = vec![usize::MAX; n];
        let mut d2 = vec![f64::INFINITY; n];
        let dm = inst.distances();
        for i in 0..n {
            let row = dm.row(i);
            for &j in open {
                let d = row[j];
                if d < d1[i] {
                    d2[i] = d1[i];
                    d1[i] = d;
                    site1[i] = j;
                } else if d < d2[i] {
                    d2[i] = d;
                }
            }
        }
        Self { d1, site1, d2 }
    }

    fn covered(&self, inst: &PMedianInstance) -> usize {
        self.d1
            .iter()
            .zip(inst.limits())
            .filter(|(d, s)| d <= s)
            .count()
    }

    /// (demand points covered, total distance) after closing `out` and opening `inn`.
    fn after_swap(&self, inst: &PMedianInstance, out: usize, inn: usize) -> (usize, f64) {
        let dm = inst.distances();
        let mut covered = 0;
        let mut total = 0.0;
        for (i, &s) in inst.limits().iter().enumerate() {
            let keep = if self.site1[i] == out {
                self.d2[i]
            } else {
                self.d1[i]
            };
            let d = keep.min(dm.get(i, inn));
            if d <= s {
                covered += 1;
            }
            total += d;
        }
        (covered, total)
    }
}

fn apply_swap(open: &mut [usize], out: usize, inn: usize) {
    let pos = open
        .iter()
        .position(|&j| j == out)
        .expect("closed site must be open");
    open[pos] = inn;
    open.sort_unstable();
}

fn closed_sites(inst: &PMedianInstance, open: &[usize]) -> Vec<usize> {
    let mut is_open = vec![false; inst.n_sites()];
    for &j in open {
        is_open[j] = true;
    }
    (0..inst.n_sites()).filter(|&j| !is_open[j]).collect()
}

/// Swaps towards full coverage: each step takes the swap that covers the most
/// demand points, then the lowest total. Returns whether every demand point is
/// covered at the end.
pub(crate) fn repair_coverage(inst: &PMedianInstance, open: &mut [usize]) -> bool {
    let n = inst.n_demand();
    loop {
        let near = Nearest::new(inst, open);
        let covered = near.covered(inst);
        if covered == n {
            return true;
        }
        let closed = closed_sites(inst, open);
        let mut best: Option<(usize, f64, usize, usize)> = None;
        for &out in open.iter() {
            for &inn in &closed {
                let (cov, total) = near.after_swap(inst, out, inn);
                let better = match best {
                    None => true,
                    Some((bc, bt, _, _)) => cov > bc || (cov == bc && total < bt),
                };
                if better {
                    best = Some((cov, total, out, inn));
                }
            }
        }
        match best {
            Some((cov, _, out, inn)) if cov > covered => apply_swap(open, out, inn),
            _ => return false,
        }
    }
}

/// First-improvement swap descent that never leaves the covering region.
/// `open` must already cover every demand point. Returns the number of moves.
pub(crate) fn swap_local_search(inst: &PMedianInstance, open: &mut [usize]) -> usize {
    let n = inst.n_demand();
    let mut moves = 0;
    loop {
        let near = Nearest::new(inst, open);
        debug_assert_eq!(near.covered(inst), n);
        let current: f64 = near.d1.iter().sum();
        let eps = 1e-9 * current.abs().max(1.0);
        let closed = closed_sites(inst, open);
        let found = open.iter().find_map(|&out| {
            closed.iter().find_map(|&inn| {
                let (cov, total) = near.after_swap(inst, out, inn);
                (cov == n && total < current - eps).then_some((out, inn))
            })
        });
        match found {
            Some((out, inn)) => {
                apply_swap(open, out, inn);
                moves += 1;
            }
            None => return moves,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::evaluate;
    use super::super::fixtures::line;
    use super::*;

    #[test]
    fn repair_reaches_coverage() {
        let inst = line(2, 3.0);
        let mut open = vec![0, 1];
        assert!(repair_coverage(&inst, &mut open));
        assert!(evaluate(&inst, &open).unwrap().feasible);
        assert!(open.contains(&3));
    }

    #[test]
    fn repair_gives_up_when_impossible() {
        let inst = line(2, 0.5);
        let mut open = vec![0, 1];
        assert!(!repair_coverage(&inst, &mut open));
    }

    #[test]
    fn local_search_improves_and_keeps_coverage() {
        let inst = line(2, 3.0);
        let mut open = vec![0, 3];
        let moves = swap_local_search(&inst, &mut open);
        assert!(moves >= 1);
        assert_eq!(open, vec![1, 3]);
        assert_eq!(evaluate(&inst, &open).unwrap().objective, 2.0);
    }
}
