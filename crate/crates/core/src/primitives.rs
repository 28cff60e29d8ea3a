//! Shared building blocks: the distance matrix container, the k-centrum
//! aggregation, Hamming distance on approval ballots, and nearest-site
//! assignment.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{param, Result};

/// Dense `n_demand × n_sites` matrix of nonnegative, finite distances.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceMatrix {
    n_demand: usize,
    n_sites: usize,
    data: Vec<f64>,
}

impl DistanceMatrix {
    pub fn new(n_demand: usize, n_sites: usize, data: Vec<f64>) -> Result<Self> {
        if n_demand == 0 || n_sites == 0 {
            return param("distance matrix needs at least one demand point and one site");
        }
        if data.len() != n_demand * n_sites {
            return param(format!(
                "distance matrix declared {n_demand}x{n_sites} but holds {} entries",
                data.len()
            ));
        }
        if let Some(pos) = data.iter().position(|d| !d.is_finite() || *d < 0.0) {
            return param(format!(
                "distance d[{}][{}] = {} is not a finite nonnegative value",
                pos / n_sites,
                pos % n_sites,
                data[pos]
            ));
        }
        Ok(Self {
            n_demand,
            n_sites,
            data,
        })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n_sites = rows.first().map_or(0, Vec::len);
        if let Some(i) = rows.iter().position(|r| r.len() != n_sites) {
            return param(format!(
                "row {i} has {} entries, expected {n_sites}",
                rows[i].len()
            ));
        }
        Self::new(rows.len(), n_sites, rows.concat())
    }

    #[inline]
    pub fn n_demand(&self) -> usize {
        self.n_demand
    }

    #[inline]
    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    #[inline]
    pub fn get(&self, demand: usize, site: usize) -> f64 {
        self.data[demand * self.n_sites + site]
    }

    #[inline]
    pub fn row(&self, demand: usize) -> &[f64] {
        &self.data[demand * self.n_sites..(demand + 1) * self.n_sites]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.n_sites)
    }

    pub fn max_entry(&self) -> f64 {
        self.data.iter().copied().fold(0.0, f64::max)
    }
}

/// The k-centrum weight vector `(1,…,1,0,…,0)` with `k` leading ones over `n` slots.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OrderedWeights {
    n: usize,
    k: usize,
}

impl OrderedWeights {
    pub fn new(n: usize, k: usize) -> Result<Self> {
        if k == 0 || k > n {
            return param(format!("k-centrum needs 1 <= k <= n, got k={k}, n={n}"));
        }
        Ok(Self { n, k })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Weight applied to the `rank`-th largest value (0-based).
    pub fn weight(&self, rank: usize) -> f64 {
        if rank < self.k {
            1.0
        } else {
            0.0
        }
    }

    pub fn aggregate(&self, values: &[f64]) -> Result<f64> {
        if values.len() != self.n {
            return param(format!(
                "weights cover {} values, got {}",
                self.n,
                values.len()
            ));
        }
        k_centrum_aggregate(values, self.k)
    }
}

/// Sum of the `k` largest entries of `values`.
pub fn k_centrum_aggregate(values: &[f64], k: usize) -> Result<f64> {
    if k == 0 || k > values.len() {
        return param(format!(
            "k-centrum needs 1 <= k <= {}, got k={k}",
            values.len()
        ));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return param("k-centrum values must be finite");
    }
    let mut sorted = values.to_vec();
    sorted.sort_unstable_by(|a, b| b.total_cmp(a));
    Ok(sorted[..k].iter().sum())
}

/// Integer k-centrum over small counts, `values[i] <= max_value`. Counting sort.
pub(crate) fn k_centrum_counts(values: &[u32], k: usize, hist: &mut Vec<u32>) -> u32 {
    let max = values.iter().copied().max().unwrap_or(0) as usize;
    hist.clear();
    hist.resize(max + 1, 0);
    for &v in values {
        hist[v as usize] += 1;
    }
    let mut remaining = k as u32;
    let mut total = 0u32;
    for v in (0..=max).rev() {
        let take = hist[v].min(remaining);
        total += take * v as u32;
        remaining -= take;
        if remaining == 0 {
            break;
        }
    }
    total
}

/// `n × m` approval ballots; `approves(i, j)` is true when voter `i` approves candidate `j`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ApprovalProfile {
    n_voters: usize,
    m_candidates: usize,
    rows: Vec<Vec<bool>>,
}

impl ApprovalProfile {
    pub fn new(rows: Vec<Vec<bool>>) -> Result<Self> {
        let n_voters = rows.len();
        let m_candidates = rows.first().map_or(0, Vec::len);
        if n_voters == 0 || m_candidates == 0 {
            return param("approval profile needs at least one voter and one candidate");
        }
        if let Some(i) = rows.iter().position(|r| r.len() != m_candidates) {
            return param(format!(
                "voter {i} ballot has {} entries, expected {m_candidates}",
                rows[i].len()
            ));
        }
        Ok(Self {
            n_voters,
            m_candidates,
            rows,
        })
    }

    /// Builds a profile from strings such as `"101"`.
    pub fn from_bit_strings<S: AsRef<str>>(rows: &[S]) -> Result<Self> {
        let rows = rows
            .iter()
            .map(|r| parse_bits(r.as_ref()))
            .collect::<Result<Vec<_>>>()?;
        Self::new(rows)
    }

    pub fn n_voters(&self) -> usize {
        self.n_voters
    }

    pub fn m_candidates(&self) -> usize {
        self.m_candidates
    }

    pub fn row(&self, voter: usize) -> &[bool] {
        &self.rows[voter]
    }

    pub fn rows(&self) -> &[Vec<bool>] {
        &self.rows
    }

    pub fn approvals(&self, candidate: usize) -> usize {
        self.rows.iter().filter(|r| r[candidate]).count()
    }

    /// Ballots packed so that candidate 0 is the most significant bit; numeric
    /// order of packed values is the lexicographic order of bit-strings.
    pub(crate) fn packed_rows(&self) -> Vec<u64> {
        debug_assert!(self.m_candidates <= 64);
        self.rows.iter().map(|r| pack_bits(r)).collect()
    }
}

/// Boolean selection vector over the candidates.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Committee(Vec<bool>);

impl Committee {
    pub fn new(bits: Vec<bool>) -> Self {
        Self(bits)
    }

    pub fn empty(m: usize) -> Self {
        Self(vec![false; m])
    }

    pub fn parse(bits: &str) -> Result<Self> {
        parse_bits(bits).map(Self)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    pub fn size(&self) -> usize {
        self.0.iter().filter(|b| **b).count()
    }

    pub fn members(&self) -> Vec<usize> {
        self.0
            .iter()
            .enumerate()
            .filter_map(|(j, b)| b.then_some(j))
            .collect()
    }

    pub(crate) fn from_packed(mask: u64, m: usize) -> Self {
        Self((0..m).map(|j| mask >> (m - 1 - j) & 1 == 1).collect())
    }

    #[cfg(test)]
    pub(crate) fn packed(&self) -> u64 {
        pack_bits(&self.0)
    }
}

impl fmt::Display for Committee {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.0 {
            f.write_str(if *b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

fn parse_bits(s: &str) -> Result<Vec<bool>> {
    s.chars()
        .map(|c| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            other => param(format!("expected 0 or 1, found {other:?}")),
        })
        .collect()
}

fn pack_bits(bits: &[bool]) -> u64 {
    bits.iter().fold(0u64, |acc, &b| acc << 1 | b as u64)
}

/// Number of coordinates where the ballot and the committee differ.
pub fn hamming(row: &[bool], committee: &Committee) -> Result<usize> {
    if row.len() != committee.len() {
        return param(format!(
            "ballot has {} entries but committee has {}",
            row.len(),
            committee.len()
        ));
    }
    Ok(row
        .iter()
        .zip(committee.bits())
        .filter(|(a, b)| a != b)
        .count())
}

/// Maps every demand point to its nearest open site (ties to the lowest site
/// index) and returns the assignment with its total distance.
pub fn closest_assignment(dm: &DistanceMatrix, open_sites: &[usize]) -> Result<(Vec<usize>, f64)> {
    if open_sites.is_empty() {
        return param("open site set is empty");
    }
    if let Some(&j) = open_sites.iter().find(|&&j| j >= dm.n_sites()) {
        return param(format!("site index {j} out of range 0..{}", dm.n_sites()));
    }
    let mut sites = open_sites.to_vec();
    sites.sort_unstable();
    sites.dedup();

    let mut assignment = Vec::with_capacity(dm.n_demand());
    let mut total = 0.0;
    for row in dm.rows() {
        let mut best = sites[0];
        for &j in &sites[1..] {
            if row[j] < row[best] {
                best = j;
            }
        }
        total += row[best];
        assignment.push(best);
    }
    Ok((assignment, total))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn k_centrum_examples() {
        assert_eq!(k_centrum_aggregate(&[3.0, 1.0, 2.0], 2).unwrap(), 5.0);
        assert_eq!(k_centrum_aggregate(&[4.0, 4.0, 4.0], 1).unwrap(), 4.0);
        assert_eq!(k_centrum_aggregate(&[2.0, 7.0, 1.0, 5.0], 4).unwrap(), 15.0);
    }

    #[test]
    fn k_centrum_rejects_bad_k() {
        assert!(k_centrum_aggregate(&[1.0, 2.0], 0).is_err());
        assert!(k_centrum_aggregate(&[1.0, 2.0], 3).is_err());
        assert!(k_centrum_aggregate(&[], 1).is_err());
        assert!(k_centrum_aggregate(&[f64::NAN], 1).is_err());
        assert!(OrderedWeights::new(3, 4).is_err());
    }

    #[test]
    fn ordered_weights_shape() {
        let w = OrderedWeights::new(4, 2).unwrap();
        let ws: Vec<f64> = (0..4).map(|r| w.weight(r)).collect();
        assert_eq!(ws, vec![1.0, 1.0, 0.0, 0.0]);
        assert_eq!(w.aggregate(&[1.0, 5.0, 3.0, 2.0]).unwrap(), 8.0);
        assert!(w.aggregate(&[1.0]).is_err());
    }

    #[test]
    fn counting_k_centrum_agrees() {
        let mut hist = Vec::new();
        assert_eq!(k_centrum_counts(&[2, 0, 1], 2, &mut hist), 3);
        assert_eq!(k_centrum_counts(&[2, 2, 2, 0], 4, &mut hist), 6);
        assert_eq!(k_centrum_counts(&[0, 0], 1, &mut hist), 0);
    }

    #[test]
    fn hamming_examples() {
        let c = |s: &str| Committee::parse(s).unwrap();
        let r = |s: &str| c(s).bits().to_vec();
        assert_eq!(hamming(&r("111"), &c("111")).unwrap(), 0);
        assert_eq!(hamming(&r("111"), &c("000")).unwrap(), 3);
        assert_eq!(hamming(&r("101"), &c("110")).unwrap(), 2);
        assert!(hamming(&r("10"), &c("110")).is_err());
    }

    #[test]
    fn committee_packing_is_lexicographic() {
        let a = Committee::parse("100").unwrap();
        let b = Committee::parse("011").unwrap();
        assert!(a.packed() > b.packed());
        assert_eq!(Committee::from_packed(a.packed(), 3), a);
        assert_eq!(a.to_string(), "100");
    }

    #[test]
    fn closest_assignment_examples() {
        let dm = DistanceMatrix::from_rows(&[vec![0.0, 9.0], vec![9.0, 0.0]]).unwrap();
        let (a, t) = closest_assignment(&dm, &[0, 1]).unwrap();
        assert_eq!((a, t), (vec![0, 1], 0.0));
        let (_, t) = closest_assignment(&dm, &[0]).unwrap();
        assert_eq!(t, 9.0);

        let eq = DistanceMatrix::from_rows(&vec![vec![5.0; 3]; 3]).unwrap();
        let (a, t) = closest_assignment(&eq, &[1, 0]).unwrap();
        assert_eq!((a, t), (vec![0, 0, 0], 15.0));

        assert!(closest_assignment(&dm, &[]).is_err());
        assert!(closest_assignment(&dm, &[2]).is_err());
    }

    #[test]
    fn matrix_validation() {
        assert!(DistanceMatrix::new(1, 2, vec![1.0]).is_err());
        assert!(DistanceMatrix::new(1, 1, vec![-1.0]).is_err());
        assert!(DistanceMatrix::new(1, 1, vec![f64::INFINITY]).is_err());
        assert!(DistanceMatrix::from_rows(&[vec![1.0], vec![1.0, 2.0]]).is_err());
        let dm = DistanceMatrix::new(2, 3, (0..6).map(f64::from).collect()).unwrap();
        assert_eq!(dm.row(1), &[3.0, 4.0, 5.0]);
        assert_eq!(dm.max_entry(), 5.0);
    }

    fn bits(m: usize) -> impl Strategy<Value = Vec<bool>> {
        proptest::collection::vec(any::<bool>(), m)
    }

    proptest! {
        #[test]
        fn k_centrum_extremes(values in proptest::collection::vec(0.0f64..100.0, 1..20)) {
            let n = values.len();
            let max = values.iter().copied().fold(f64::MIN, f64::max);
            let sum: f64 = values.iter().sum();
            prop_assert_eq!(k_centrum_aggregate(&values, 1).unwrap(), max);
            prop_assert!((k_centrum_aggregate(&values, n).unwrap() - sum).abs() < 1e-9);
        }

        #[test]
        fn k_centrum_monotone_in_k(values in proptest::collection::vec(0.0f64..100.0, 1..20)) {
            let mut prev = 0.0;
            for k in 1..=values.len() {
                let v = k_centrum_aggregate(&values, k).unwrap();
                prop_assert!(v >= prev);
                prev = v;
            }
        }

        #[test]
        fn k_centrum_permutation_invariant(
            values in proptest::collection::vec(0.0f64..100.0, 1..20),
            k_frac in 0.0f64..1.0,
        ) {
            let k = 1 + ((values.len() - 1) as f64 * k_frac) as usize;
            let mut rev = values.clone();
            rev.reverse();
            let mut rotated = values.clone();
            rotated.rotate_left(values.len() / 2);
            let base = k_centrum_aggregate(&values, k).unwrap();
            prop_assert_eq!(base, k_centrum_aggregate(&rev, k).unwrap());
            prop_assert_eq!(base, k_centrum_aggregate(&rotated, k).unwrap());
        }

        #[test]
        fn hamming_is_a_metric((a, b, c) in (1usize..16).prop_flat_map(|m| (bits(m), bits(m), bits(m)))) {
            let (ca, cb, cc) = (Committee::new(a.clone()), Committee::new(b.clone()), Committee::new(c));
            let ab = hamming(&a, &cb).unwrap();
            prop_assert_eq!(ab, hamming(&b, &ca).unwrap());
            prop_assert_eq!(hamming(&a, &ca).unwrap(), 0);
            prop_assert_eq!(ab == 0, a == b);
            prop_assert!(ab <= hamming(&a, &cc).unwrap() + hamming(cc.bits(), &cb).unwrap());
        }

        #[test]
        fn closest_assignment_monotone(
            rows in proptest::collection::vec(proptest::collection::vec(0u32..50, 6), 1..8),
            open in proptest::collection::btree_set(0usize..6, 1..6),
            extra in 0usize..6,
        ) {
            let rows: Vec<Vec<f64>> = rows.into_iter().map(|r| r.into_iter().map(f64::from).collect()).collect();
            let dm = DistanceMatrix::from_rows(&rows).unwrap();
            let small: Vec<usize> = open.iter().copied().collect();
            let mut big = small.clone();
            big.push(extra);
            let (_, t_small) = closest_assignment(&dm, &small).unwrap();
            let (_, t_big) = closest_assignment(&dm, &big).unwrap();
            prop_assert!(t_big <= t_small);
        }
    }
}
