//! Oracle-equivalence checks run by `locopt bench --selftest`. Every check is
//! a pure function of the seed, so the rendered table is reproducible byte
//! for byte.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::committee::{k_centrum_solve, minisum_solve, CommitteeProblem, Strategy};
use crate::error::Result;
use crate::io::generate::{generate_pmpdc, generate_profiles};
use crate::io::table::render_table;
use crate::oracle;
use crate::pmedian::{
    choose_big_m, exact_solve, feasibility_check, grasp_solve, lagrangian_bound, solve_pmp_exact,
    transform_distances, ExactOptions, GraspParams, LagrangianParams, PMedianInstance, PMin,
};
use crate::sensors::{eccentricity, strip_areas, triangle_area, Point, Rect, ZonePartition};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub cases: usize,
    pub mismatches: usize,
    /// First mismatch, if any.
    pub example: String,
}

impl Check {
    fn new(name: &str) -> Self {
        Self {
            name: name.to_string(),
            cases: 0,
            mismatches: 0,
            example: String::new(),
        }
    }

    fn record(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            if self.mismatches == 0 {
                self.example = what();
            }
            self.mismatches += 1;
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SelftestReport {
    pub seed: u64,
    pub checks: Vec<Check>,
}

impl SelftestReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.mismatches == 0)
    }

    fn cells(&self) -> Vec<Vec<String>> {
        self.checks
            .iter()
            .map(|c| {
                vec![
                    c.name.clone(),
                    c.cases.to_string(),
                    c.mismatches.to_string(),
                    if c.mismatches == 0 { "pass" } else { "FAIL" }.to_string(),
                    c.example.clone(),
                ]
            })
            .collect()
    }

    const HEADERS: [&'static str; 5] = ["check", "cases", "mismatches", "status", "example"];

    pub fn to_table(&self) -> String {
        render_table(&Self::HEADERS, &self.cells())
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let wrap = |e: csv::Error| crate::Error::Io(std::io::Error::other(e));
        w.write_record(Self::HEADERS).map_err(wrap)?;
        for row in self.cells() {
            w.write_record(row).map_err(wrap)?;
        }
        let bytes = w
            .into_inner()
            .map_err(|e| crate::Error::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}

const PMEDIAN_CASES: usize = 24;
const PROFILE_CASES: usize = 24;
const TRIANGLES: usize = 200;

fn pmedian_cases(seed: u64) -> Result<Vec<PMedianInstance>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(11);
    (0..PMEDIAN_CASES)
        .map(|_| {
            let n = rng.random_range(6..=10);
            let p = rng.random_range(2..=4);
            let q = [0.3, 0.5, 1.0][rng.random_range(0..3)];
            generate_pmpdc(rng.random(), n, p, q)
        })
        .collect()
}

/// Runs every check; solver errors propagate since the instances are all in budget.
pub fn run_selftest(seed: u64) -> Result<SelftestReport> {
    let mut exact = Check::new("pmpdc exact = enumeration");
    let mut bigm = Check::new("big-M optimum = constrained optimum");
    let mut sandwich = Check::new("lagrangian <= exact <= grasp");
    let mut pmin = Check::new("p_min = smallest feasible p");
    for (t, inst) in pmedian_cases(seed)?.iter().enumerate() {
        let brute = oracle::brute_force_pmpdc(inst);
        let out = exact_solve(inst)?;
        exact.record(out.objective() == brute.as_ref().map(|b| b.1), || {
            format!(
                "case {t}: {:?} vs {:?}",
                out.objective(),
                brute.as_ref().map(|b| b.1)
            )
        });

        let m = choose_big_m(inst);
        let relaxed = solve_pmp_exact(
            &transform_distances(inst, m)?,
            inst.p(),
            &ExactOptions::default(),
        )?;
        let ok = match &brute {
            Some((_, v)) => relaxed.objective == *v,
            None => relaxed.objective >= m,
        };
        bigm.record(ok, || {
            format!("case {t}: {} with M = {m}", relaxed.objective)
        });

        if let Some((_, opt)) = brute {
            let lb = lagrangian_bound(inst, &LagrangianParams::default())?.lower_bound;
            let (g, _) = grasp_solve(
                inst,
                &GraspParams {
                    seed,
                    ..GraspParams::default()
                },
            )?;
            let ub = g.objective().unwrap_or(f64::INFINITY);
            let tol = 1e-9 * opt.abs().max(1.0);
            sandwich.record(lb <= opt + tol && opt <= ub + tol, || {
                format!("case {t}: {lb} / {opt} / {ub}")
            });
        }

        let reported = match feasibility_check(inst).p_min {
            PMin::Exact(p) => Some(p),
            _ => None,
        };
        let smallest = (1..=inst.n_sites()).find(|&p| {
            inst.with_p(p)
                .and_then(|i| exact_solve(&i))
                .is_ok_and(|o| o.is_feasible())
        });
        pmin.record(reported == smallest, || {
            format!("case {t}: {reported:?} vs {smallest:?}")
        });
    }

    let mut committee = Check::new("k-centrum exact = enumeration");
    let mut minisum = Check::new("minisum = enumeration at k = n");
    let mut monotone = Check::new("optimum nondecreasing in k");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(12);
    for t in 0..PROFILE_CASES {
        let n = rng.random_range(3..=9);
        let m = rng.random_range(3..=9);
        let density = [0.2, 0.5, 0.8][rng.random_range(0..3)];
        let profile = generate_profiles(rng.random(), n, m, density)?;
        let mut prev = 0;
        for k in 1..=n {
            let prob = CommitteeProblem::new(profile.clone(), k)?;
            let (best, value) = oracle::brute_force_committee(&prob);
            if k == 1 || k == n.div_ceil(2) || k == n {
                let sol = k_centrum_solve(&prob, Strategy::Exact)?;
                committee.record(sol.committee == best && sol.objective == value, || {
                    format!(
                        "profile {t} k={k}: {} ({}) vs {best} ({value})",
                        sol.committee, sol.objective
                    )
                });
            }
            if k == n {
                let ms = minisum_solve(&profile);
                minisum.record(ms.committee == best && ms.objective == value, || {
                    format!("profile {t}: {} vs {best}", ms.committee)
                });
            }
            monotone.record(value >= prev, || {
                format!("profile {t} k={k}: {value} < {prev}")
            });
            prev = value;
        }
    }

    let mut corner = Check::new("eccentricity = boundary sample max");
    let mut additivity = Check::new("strip areas sum to triangle area");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(13);
    let rect = Rect::new(3.0, 1.0)?;
    let zones = ZonePartition::new(&rect, &[0.7, 1.9], &[1.0, 2.0, 1.5])?;
    for t in 0..TRIANGLES {
        let mut pt = || Point::new(rng.random_range(0.0..=3.0), rng.random_range(0.0..=1.0));
        let tri = [pt(), pt(), pt()];
        let whole = triangle_area(&tri)?;
        let parts: f64 = strip_areas(&rect, &zones, tri).iter().sum();
        additivity.record((parts - whole).abs() <= 1e-9 * whole.max(1e-12), || {
            format!("triangle {t}: {parts} vs {whole}")
        });

        // distance to q is 1-Lipschitz along the boundary, so the sample
        // maximum is within half a spacing of the true one
        let q = tri[0];
        let half_spacing = (rect.width() + rect.height()) / 400.0;
        let sampled = (0..400)
            .map(|s| boundary_sample(&rect, s, 400).dist(q))
            .fold(0.0, f64::max);
        let e = eccentricity(q, &rect);
        corner.record(e >= sampled - 1e-12 && e - sampled <= half_spacing, || {
            format!("point {t}: {e} vs {sampled}")
        });
    }

    Ok(SelftestReport {
        seed,
        checks: vec![
            exact, bigm, sandwich, pmin, committee, minisum, monotone, corner, additivity,
        ],
    })
}

/// Sample `s` of `count` equally spaced along the perimeter, starting at the origin.
fn boundary_sample(rect: &Rect, s: usize, count: usize) -> Point {
    let (a, b) = (rect.width(), rect.height());
    let mut d = 2.0 * (a + b) * s as f64 / count as f64;
    for (len, start, dir) in [
        (a, Point::new(0.0, 0.0), (1.0, 0.0)),
        (b, Point::new(a, 0.0), (0.0, 1.0)),
        (a, Point::new(a, b), (-1.0, 0.0)),
        (b, Point::new(0.0, b), (0.0, -1.0)),
    ] {
        if d <= len {
            return Point::new(start.x + dir.0 * d, start.y + dir.1 * d);
        }
        d -= len;
    }
    Point::new(0.0, 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn selftest_passes_and_repeats() {
        let a = run_selftest(0).unwrap();
        assert!(a.passed(), "{}", a.to_table());
        assert_eq!(a.to_table(), run_selftest(0).unwrap().to_table());
    }
}
