//! Seeded random instances. The same seed always yields the same instance.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{param, Result};
use crate::pmedian::PMedianInstance;
use crate::primitives::{ApprovalProfile, DistanceMatrix};

/// `n` points uniform in the unit square serve as both demand points and
/// sites. Distances are `round(1000 * euclidean)`, so instances are integral.
/// `s_i` is the nearest-rank `s_quantile` of row `i`'s positive distances.
pub fn generate_pmpdc(seed: u64, n: usize, p: usize, s_quantile: f64) -> Result<PMedianInstance> {
    if n == 0 {
        return param("n must be positive");
    }
    if !(s_quantile > 0.0 && s_quantile <= 1.0) {
        return param(format!("quantile must lie in (0, 1], got {s_quantile}"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pts: Vec<(f64, f64)> = (0..n)
        .map(|_| (rng.random::<f64>(), rng.random::<f64>()))
        .collect();
    let rows: Vec<Vec<f64>> = pts
        .iter()
        .map(|a| {
            pts.iter()
                .map(|b| (1000.0 * (a.0 - b.0).hypot(a.1 - b.1)).round())
                .collect()
        })
        .collect();
    let s = rows.iter().map(|r| nearest_rank(r, s_quantile)).collect();
    PMedianInstance::new(DistanceMatrix::from_rows(&rows)?, p, s)
}

fn nearest_rank(row: &[f64], q: f64) -> f64 {
    let mut pos: Vec<f64> = row.iter().copied().filter(|&d| d > 0.0).collect();
    if pos.is_empty() {
        return 0.0;
    }
    pos.sort_by(f64::total_cmp);
    let rank = ((q * pos.len() as f64).ceil() as usize).clamp(1, pos.len());
    pos[rank - 1]
}

/// `n` ballots over `m` candidates, each approval independent with probability `density`.
pub fn generate_profiles(seed: u64, n: usize, m: usize, density: f64) -> Result<ApprovalProfile> {
    if !(0.0..=1.0).contains(&density) {
        return param(format!("density must lie in [0, 1], got {density}"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rows = (0..n)
        .map(|_| (0..m).map(|_| rng.random_bool(density)).collect())
        .collect();
    ApprovalProfile::new(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_integral() {
        let a = generate_pmpdc(7, 12, 3, 0.3).unwrap();
        assert_eq!(a, generate_pmpdc(7, 12, 3, 0.3).unwrap());
        assert_ne!(a, generate_pmpdc(8, 12, 3, 0.3).unwrap());
        assert!(a.is_integral());
        for i in 0..12 {
            assert_eq!(a.distances().get(i, i), 0.0);
            for j in 0..12 {
                assert_eq!(a.distances().get(i, j), a.distances().get(j, i));
            }
        }
    }

    #[test]
    fn quantile_extremes() {
        let row = [0.0, 5.0, 1.0, 3.0];
        assert_eq!(nearest_rank(&row, 0.1), 1.0);
        assert_eq!(nearest_rank(&row, 0.5), 3.0);
        assert_eq!(nearest_rank(&row, 1.0), 5.0);
        assert_eq!(nearest_rank(&[0.0], 0.5), 0.0);
    }

    #[test]
    fn profiles() {
        let p = generate_profiles(1, 20, 6, 0.5).unwrap();
        assert_eq!((p.n_voters(), p.m_candidates()), (20, 6));
        assert_eq!(p, generate_profiles(1, 20, 6, 0.5).unwrap());
        let full = generate_profiles(1, 3, 4, 1.0).unwrap();
        assert!(full.rows().iter().all(|r| r.iter().all(|&b| b)));
        assert!(generate_profiles(1, 3, 4, 1.5).is_err());
    }
}
