//! Benchmark harness: generates seeded instances, runs the configured solvers
//! and gathers one [`ResultRow`] per (instance, solver).

use std::collections::BTreeMap;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::committee::{k_centrum_solve, minisum_solve, CommitteeProblem, Strategy};
use crate::error::{param, Error, Result};
use crate::pmedian::{
    exact_solve_with, grasp_solve, lagrangian_bound, ExactOptions, GraspParams, LagrangianParams,
    Outcome, PMedianInstance,
};
use crate::primitives::ApprovalProfile;

use super::generate::{generate_pmpdc, generate_profiles};
use super::table::{fmt_opt, render_table};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolverKind {
    Exact,
    Lagrangian,
    Grasp,
    CommitteeExact,
    CommitteeHeuristic,
    Minisum,
}

impl SolverKind {
    pub const ALL: [SolverKind; 6] = [
        Self::Exact,
        Self::Lagrangian,
        Self::Grasp,
        Self::CommitteeExact,
        Self::CommitteeHeuristic,
        Self::Minisum,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Exact => "exact",
            Self::Lagrangian => "lagrangian",
            Self::Grasp => "grasp",
            Self::CommitteeExact => "committee-exact",
            Self::CommitteeHeuristic => "committee-heuristic",
            Self::Minisum => "minisum",
        }
    }

    fn is_pmedian(self) -> bool {
        matches!(self, Self::Exact | Self::Lagrangian | Self::Grasp)
    }
}

/// Which `k` values to solve each generated profile for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KRule {
    One,
    /// `ceil(n / 2)`.
    Half,
    All,
    Fixed(usize),
}

impl KRule {
    fn resolve(self, n: usize) -> usize {
        match self {
            Self::One => 1,
            Self::Half => n.div_ceil(2),
            Self::All => n,
            Self::Fixed(k) => k.clamp(1, n),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PmpdcSuite {
    pub instances: usize,
    /// Inclusive range for `n = m`.
    pub n: (usize, usize),
    pub p: (usize, usize),
    pub s_quantiles: Vec<f64>,
}

impl Default for PmpdcSuite {
    fn default() -> Self {
        Self {
            instances: 10,
            n: (6, 14),
            p: (2, 4),
            s_quantiles: vec![0.3, 0.5, 1.0],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CommitteeSuite {
    pub profiles: usize,
    pub n: (usize, usize),
    pub m: (usize, usize),
    pub densities: Vec<f64>,
    pub ks: Vec<KRule>,
}

impl Default for CommitteeSuite {
    fn default() -> Self {
        Self {
            profiles: 10,
            n: (3, 12),
            m: (3, 12),
            densities: vec![0.2, 0.5, 0.8],
            ks: vec![KRule::One, KRule::Half, KRule::All],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BenchConfig {
    pub seed: u64,
    pub pmpdc: PmpdcSuite,
    pub committee: CommitteeSuite,
    pub solvers: Vec<SolverKind>,
    /// The seed field is replaced per instance.
    pub grasp: GraspParams,
    pub lagrangian: LagrangianParams,
    pub heuristic_starts: usize,
    pub exact_budget: u64,
    /// Soft limit: a slower run is flagged in its row, not interrupted.
    pub time_limit_secs: Option<f64>,
    /// Off by default so that tables are byte-identical across runs.
    pub record_timings: bool,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            pmpdc: PmpdcSuite::default(),
            committee: CommitteeSuite::default(),
            solvers: SolverKind::ALL.to_vec(),
            grasp: GraspParams::default(),
            lagrangian: LagrangianParams::default(),
            heuristic_starts: 32,
            exact_budget: 10_000_000,
            time_limit_secs: None,
            record_timings: false,
        }
    }
}

impl BenchConfig {
    pub fn validate(&self) -> Result<()> {
        let range = |name: &str, (lo, hi): (usize, usize)| {
            if lo == 0 || lo > hi {
                param(format!(
                    "{name} range must be nonempty and start at 1 or more, got {lo}..={hi}"
                ))
            } else {
                Ok(())
            }
        };
        if self.pmpdc.instances == 0 || self.committee.profiles == 0 {
            return param("instance and profile counts must be at least 1");
        }
        range("pmpdc.n", self.pmpdc.n)?;
        range("pmpdc.p", self.pmpdc.p)?;
        range("committee.n", self.committee.n)?;
        range("committee.m", self.committee.m)?;
        if self.pmpdc.p.0 > self.pmpdc.n.0 {
            return param("pmpdc.p must not exceed the smallest n");
        }
        if self.pmpdc.s_quantiles.is_empty()
            || self.committee.densities.is_empty()
            || self.committee.ks.is_empty()
        {
            return param("quantile, density and k lists must be nonempty");
        }
        if self.heuristic_starts == 0 {
            return param("heuristic_starts must be at least 1");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RowStatus {
    Feasible,
    Infeasible,
    /// Lower bound only.
    Bound,
    Error,
}

impl RowStatus {
    pub fn name(self) -> &'static str {
        match self {
            Self::Feasible => "feasible",
            Self::Infeasible => "infeasible",
            Self::Bound => "bound",
            Self::Error => "error",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub instance: String,
    pub solver: String,
    pub status: RowStatus,
    /// Objective, or the bound for bounding methods.
    pub value: Option<f64>,
    /// Exact optimum for the same instance, when an exact solver ran and succeeded.
    pub reference: Option<f64>,
    /// `(value - reference) / max(|reference|, 1)`.
    pub gap: Option<f64>,
    pub wall_ms: Option<f64>,
    pub seed: u64,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct BenchTable {
    pub rows: Vec<ResultRow>,
}

const HEADERS: [&str; 9] = [
    "instance",
    "solver",
    "status",
    "value",
    "reference",
    "gap",
    "wall_ms",
    "seed",
    "detail",
];

impl BenchTable {
    fn cells(row: &ResultRow) -> Vec<String> {
        vec![
            row.instance.clone(),
            row.solver.clone(),
            row.status.name().to_string(),
            fmt_opt(row.value),
            fmt_opt(row.reference),
            fmt_opt(row.gap),
            fmt_opt(row.wall_ms),
            row.seed.to_string(),
            row.detail.clone(),
        ]
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let csv_err = |e: csv::Error| Error::Io(std::io::Error::other(e));
        w.write_record(HEADERS).map_err(csv_err)?;
        for row in &self.rows {
            w.write_record(Self::cells(row)).map_err(csv_err)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    pub fn to_table(&self) -> String {
        let rows: Vec<Vec<String>> = self.rows.iter().map(Self::cells).collect();
        render_table(&HEADERS, &rows)
    }

    pub fn summary(&self, config: &BenchConfig) -> BenchSummary {
        let mut per_solver: BTreeMap<String, SolverSummary> = BTreeMap::new();
        for row in &self.rows {
            let s = per_solver.entry(row.solver.clone()).or_default();
            s.runs += 1;
            match row.status {
                RowStatus::Feasible => s.feasible += 1,
                RowStatus::Infeasible => s.infeasible += 1,
                RowStatus::Bound => {}
                RowStatus::Error => s.errors += 1,
            }
            if let Some(g) = row.gap {
                s.gaps += 1;
                s.mean_abs_gap += g.abs();
                s.max_abs_gap = s.max_abs_gap.max(g.abs());
            }
        }
        for s in per_solver.values_mut() {
            if s.gaps > 0 {
                s.mean_abs_gap /= s.gaps as f64;
            }
        }
        BenchSummary {
            config: config.clone(),
            rows: self.rows.len(),
            per_solver,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SolverSummary {
    pub runs: usize,
    pub feasible: usize,
    pub infeasible: usize,
    pub errors: usize,
    /// Rows that had a reference value.
    pub gaps: usize,
    pub mean_abs_gap: f64,
    pub max_abs_gap: f64,
}

/// Everything needed to reproduce a run, plus aggregate statistics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchSummary {
    pub config: BenchConfig,
    pub rows: usize,
    pub per_solver: BTreeMap<String, SolverSummary>,
}

/// Runs every configured solver on every generated instance. Solver errors
/// land in their row; only an invalid config fails the whole run.
pub fn run_benchmark(config: &BenchConfig) -> Result<BenchTable> {
    config.validate()?;
    let mut rows = Vec::new();
    let solvers: Vec<SolverKind> = {
        let mut s = config.solvers.clone();
        s.sort();
        s.dedup();
        s
    };
    if solvers.iter().any(|s| s.is_pmedian()) {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        rng.set_stream(1);
        for t in 0..config.pmpdc.instances {
            let suite = &config.pmpdc;
            let n = rng.random_range(suite.n.0..=suite.n.1);
            let p = rng.random_range(suite.p.0..=suite.p.1.min(n));
            let q = suite.s_quantiles[rng.random_range(0..suite.s_quantiles.len())];
            let seed = rng.random::<u64>();
            let id = format!("pmpdc-{t:03}");
            match generate_pmpdc(seed, n, p, q) {
                Ok(inst) => rows.extend(run_pmedian(config, &solvers, &id, &inst, seed)),
                Err(e) => rows.push(error_row(&id, "generate", seed, &e)),
            }
        }
    }
    if solvers.iter().any(|s| !s.is_pmedian()) {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        rng.set_stream(2);
        for t in 0..config.committee.profiles {
            let suite = &config.committee;
            let n = rng.random_range(suite.n.0..=suite.n.1);
            let m = rng.random_range(suite.m.0..=suite.m.1);
            let density = suite.densities[rng.random_range(0..suite.densities.len())];
            let seed = rng.random::<u64>();
            let profile = match generate_profiles(seed, n, m, density) {
                Ok(p) => p,
                Err(e) => {
                    rows.push(error_row(
                        &format!("committee-{t:03}"),
                        "generate",
                        seed,
                        &e,
                    ));
                    continue;
                }
            };
            let mut ks: Vec<usize> = suite.ks.iter().map(|r| r.resolve(n)).collect();
            ks.sort_unstable();
            ks.dedup();
            for k in ks {
                let id = format!("committee-{t:03}-k{k:02}");
                rows.extend(run_committee(config, &solvers, &id, &profile, k, seed));
            }
        }
    }
    rows.sort_by(|a, b| (&a.instance, &a.solver).cmp(&(&b.instance, &b.solver)));
    Ok(BenchTable { rows })
}

fn error_row(instance: &str, solver: &str, seed: u64, e: &Error) -> ResultRow {
    ResultRow {
        instance: instance.to_string(),
        solver: solver.to_string(),
        status: RowStatus::Error,
        value: None,
        reference: None,
        gap: None,
        wall_ms: None,
        seed,
        detail: e.to_string(),
    }
}

struct Timed<T> {
    value: T,
    ms: f64,
}

fn timed<T>(f: impl FnOnce() -> T) -> Timed<T> {
    let start = Instant::now();
    let value = f();
    Timed {
        value,
        ms: start.elapsed().as_secs_f64() * 1e3,
    }
}

fn finish_rows(
    config: &BenchConfig,
    rows: &mut [ResultRow],
    timings: &[f64],
    reference: Option<f64>,
) {
    for (row, &ms) in rows.iter_mut().zip(timings) {
        row.reference = reference;
        if let (Some(v), Some(r)) = (row.value, reference) {
            row.gap = Some((v - r) / r.abs().max(1.0));
        }
        if let Some(limit) = config.time_limit_secs {
            if ms > limit * 1e3 {
                if !row.detail.is_empty() {
                    row.detail.push_str("; ");
                }
                row.detail.push_str("over time limit");
            }
        }
        if config.record_timings {
            row.wall_ms = Some(ms);
        }
    }
}

fn outcome_row(id: &str, solver: &str, seed: u64, outcome: &Outcome) -> ResultRow {
    let (status, detail) = match outcome {
        Outcome::Feasible(_) => (RowStatus::Feasible, String::new()),
        Outcome::Infeasible(w) => (RowStatus::Infeasible, w.to_string()),
    };
    ResultRow {
        instance: id.to_string(),
        solver: solver.to_string(),
        status,
        value: outcome.objective(),
        reference: None,
        gap: None,
        wall_ms: None,
        seed,
        detail,
    }
}

fn run_pmedian(
    config: &BenchConfig,
    solvers: &[SolverKind],
    id: &str,
    inst: &PMedianInstance,
    seed: u64,
) -> Vec<ResultRow> {
    let mut rows = Vec::new();
    let mut timings = Vec::new();
    let mut reference = None;
    for &solver in solvers.iter().filter(|s| s.is_pmedian()) {
        let name = solver.name();
        let run = match solver {
            SolverKind::Exact => timed(|| {
                let opts = ExactOptions {
                    budget: config.exact_budget.into(),
                    ..ExactOptions::default()
                };
                exact_solve_with(inst, &opts).map(|o| {
                    reference = o.objective();
                    outcome_row(id, name, seed, &o)
                })
            }),
            SolverKind::Grasp => timed(|| {
                let params = GraspParams {
                    seed,
                    ..config.grasp
                };
                grasp_solve(inst, &params).map(|(o, _)| outcome_row(id, name, seed, &o))
            }),
            SolverKind::Lagrangian => timed(|| {
                lagrangian_bound(inst, &config.lagrangian).map(|r| ResultRow {
                    instance: id.to_string(),
                    solver: name.to_string(),
                    status: RowStatus::Bound,
                    value: Some(r.lower_bound).filter(|b| b.is_finite()),
                    reference: None,
                    gap: None,
                    wall_ms: None,
                    seed,
                    detail: r.incumbent.map_or_else(
                        || "no incumbent".to_string(),
                        |s| format!("incumbent {}", s.objective),
                    ),
                })
            }),
            _ => unreachable!("filtered to p-median solvers"),
        };
        timings.push(run.ms);
        rows.push(run.value.unwrap_or_else(|e| error_row(id, name, seed, &e)));
    }
    finish_rows(config, &mut rows, &timings, reference);
    rows
}

fn run_committee(
    config: &BenchConfig,
    solvers: &[SolverKind],
    id: &str,
    profile: &ApprovalProfile,
    k: usize,
    seed: u64,
) -> Vec<ResultRow> {
    let mut rows = Vec::new();
    let mut timings = Vec::new();
    let mut reference = None;
    let prob = match CommitteeProblem::new(profile.clone(), k) {
        Ok(p) => p,
        Err(e) => return vec![error_row(id, "committee", seed, &e)],
    };
    for &solver in solvers.iter().filter(|s| !s.is_pmedian()) {
        if solver == SolverKind::Minisum && k != profile.n_voters() {
            continue;
        }
        let name = solver.name();
        let run = timed(|| match solver {
            SolverKind::CommitteeExact => k_centrum_solve(&prob, Strategy::Exact).inspect(|s| {
                reference = Some(s.objective as f64);
            }),
            SolverKind::CommitteeHeuristic => k_centrum_solve(
                &prob,
                Strategy::Heuristic {
                    starts: config.heuristic_starts,
                    seed,
                },
            ),
            SolverKind::Minisum => Ok(minisum_solve(profile)),
            _ => unreachable!("filtered to committee solvers"),
        });
        timings.push(run.ms);
        rows.push(match run.value {
            Ok(sol) => ResultRow {
                instance: id.to_string(),
                solver: name.to_string(),
                status: RowStatus::Feasible,
                value: Some(sol.objective as f64),
                reference: None,
                gap: None,
                wall_ms: None,
                seed,
                detail: sol.committee.to_string(),
            },
            Err(e) => error_row(id, name, seed, &e),
        });
    }
    finish_rows(config, &mut rows, &timings, reference);
    rows
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> BenchConfig {
        BenchConfig {
            pmpdc: PmpdcSuite {
                instances: 4,
                n: (6, 8),
                ..PmpdcSuite::default()
            },
            committee: CommitteeSuite {
                profiles: 3,
                n: (3, 6),
                m: (3, 6),
                ..CommitteeSuite::default()
            },
            ..BenchConfig::default()
        }
    }

    #[test]
    fn repeatable_and_sorted() {
        let cfg = small();
        let a = run_benchmark(&cfg).unwrap();
        let b = run_benchmark(&cfg).unwrap();
        assert_eq!(a.to_csv().unwrap(), b.to_csv().unwrap());
        assert_eq!(a.to_table(), b.to_table());
        let keys: Vec<_> = a
            .rows
            .iter()
            .map(|r| (r.instance.clone(), r.solver.clone()))
            .collect();
        let mut sorted = keys.clone();
        sorted.sort();
        assert_eq!(keys, sorted);
    }

    #[test]
    fn gaps_have_expected_signs() {
        let table = run_benchmark(&small()).unwrap();
        for row in &table.rows {
            assert!(row.gap.is_none() || row.reference.is_some());
            match row.solver.as_str() {
                "grasp" | "committee-heuristic" | "minisum" => {
                    assert!(row.gap.is_none_or(|g| g >= 0.0), "{row:?}")
                }
                "lagrangian" => assert!(row.gap.is_none_or(|g| g <= 0.0), "{row:?}"),
                "exact" | "committee-exact" => assert!(row.gap.is_none_or(|g| g == 0.0)),
                _ => {}
            }
        }
    }

    #[test]
    fn empty_solver_list() {
        let cfg = BenchConfig {
            solvers: vec![],
            ..small()
        };
        assert!(run_benchmark(&cfg).unwrap().rows.is_empty());
    }

    #[test]
    fn solver_errors_stay_in_rows() {
        let cfg = BenchConfig {
            solvers: vec![SolverKind::Exact, SolverKind::Grasp],
            exact_budget: 1,
            ..small()
        };
        let table = run_benchmark(&cfg).unwrap();
        assert!(table
            .rows
            .iter()
            .any(|r| r.status == RowStatus::Error && r.solver == "exact"));
        assert!(table
            .rows
            .iter()
            .any(|r| r.solver == "grasp" && r.status != RowStatus::Error));
    }

    #[test]
    fn invalid_config() {
        let mut cfg = small();
        cfg.pmpdc.instances = 0;
        assert!(run_benchmark(&cfg).is_err());
        let mut cfg = small();
        cfg.committee.m = (5, 4);
        assert!(run_benchmark(&cfg).is_err());
    }

    #[test]
    fn config_json_round_trip() {
        let cfg = small();
        let json = serde_json::to_string(&cfg).unwrap();
        assert_eq!(serde_json::from_str::<BenchConfig>(&json).unwrap(), cfg);
        let partial: BenchConfig =
            serde_json::from_str(r#"{"seed": 5, "solvers": ["exact"]}"#).unwrap();
        assert_eq!(partial.seed, 5);
        assert_eq!(partial.pmpdc, PmpdcSuite::default());
    }
}
