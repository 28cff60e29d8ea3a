//! Command-line front end. [`run`] takes the argument list and output
//! streams and returns the process exit code, so it can be driven from tests.
//!
//! Exit codes: 0 solved or feasible, 1 no solution found without proof of
//! infeasibility, 2 proven infeasible, 3 enumeration budget exceeded,
//! 4 bad input or arguments.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::committee::{k_centrum_solve, minisum_solve, CommitteeProblem, Strategy};
use crate::error::{Error, Result};
use crate::io::{
    parse_native, parse_orlib_pmedian, run_benchmark, table::render_table, to_native_string,
    BenchConfig, CoverageRule, NativeBody, NativeFile,
};
use crate::pmedian::{
    choose_big_m, exact_solve_with, feasibility_check, grasp_solve, lagrangian_bound,
    solve_pmp_exact, transform_distances, ExactOptions, GraspParams, InfeasibilityWitness,
    LagrangianParams, Outcome, PMedianInstance, PMin, UpperBoundSource, Verdict,
};
use crate::primitives::ApprovalProfile;
use crate::selftest::run_selftest;
use crate::sensors::{
    eccentricity_field, solve_max_area, solve_minmaxmax, solve_weighted_area, GridSpec,
    SensorSolution,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NOT_FOUND: i32 = 1;
pub const EXIT_INFEASIBLE: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;
pub const EXIT_INPUT: i32 = 4;

#[derive(Debug, Parser)]
#[command(
    name = "locopt",
    version,
    about = "Constrained p-median, committee election and sensor placement solvers"
)]
pub struct Cli {
    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    format: Format,
    /// Write results here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Print solver statistics to stderr.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Table,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve a distance-constrained p-median instance.
    SolvePmpdc(SolvePmpdc),
    /// Elect a committee from an approval profile.
    SolveCommittee(SolveCommittee),
    /// Place sensors on a rectangle.
    SolveSensors(SolveSensors),
    /// Decide whether p sites can cover every demand point.
    Feascheck(InstanceArgs),
    /// Write a random instance in the native format.
    Gen(Gen),
    /// Run the benchmark harness or the oracle self-test.
    Bench(Bench),
}

#[derive(Debug, Args)]
struct InstanceArgs {
    /// Instance file.
    file: PathBuf,
    /// Read an OR-Library pmed graph instead of the native format.
    #[arg(long)]
    orlib: bool,
    /// Limit multiplier for OR-Library files.
    #[arg(long, default_value_t = 1.1)]
    beta: f64,
    /// Rank of the row entry scaled by beta; defaults to ceil(m / 10).
    #[arg(long)]
    q: Option<usize>,
    /// Override the number of sites to open.
    #[arg(long)]
    p: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PmpdcSolver {
    Exact,
    Grasp,
    Lagrangian,
    /// Exact solve of the unconstrained problem with over-limit distances set to a large M.
    Bigm,
}

#[derive(Debug, Args)]
struct SolvePmpdc {
    #[command(flatten)]
    input: InstanceArgs,
    #[arg(long, value_enum, default_value_t = PmpdcSolver::Exact)]
    solver: PmpdcSolver,
    /// GRASP restarts.
    #[arg(long, default_value_t = 50)]
    iterations: usize,
    /// Restricted candidate list width for GRASP, as a fraction of the cost range.
    #[arg(long, default_value_t = 0.15)]
    alpha: f64,
    /// Largest number of candidate site sets the exact solver may examine.
    #[arg(long, default_value_t = 10_000_000)]
    budget: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CommitteeRule {
    KCentrum,
    Minisum,
    Minimax,
}

#[derive(Debug, Args)]
struct SolveCommittee {
    /// Approval file.
    file: PathBuf,
    /// Number of worst-off voters summed; defaults to the file's k.
    #[arg(long)]
    k: Option<usize>,
    #[arg(long, value_enum, default_value_t = CommitteeRule::KCentrum)]
    rule: CommitteeRule,
    /// Local search from random starts instead of exhaustive search.
    #[arg(long)]
    heuristic: bool,
    /// Random starts for --heuristic.
    #[arg(long, default_value_t = 32)]
    starts: usize,
    /// Require exactly this many members.
    #[arg(long)]
    size: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Criterion {
    Minmaxmax,
    MaxArea,
    Weighted,
}

#[derive(Debug, Args)]
struct SolveSensors {
    /// Sensors file.
    file: PathBuf,
    #[arg(long, value_enum, default_value_t = Criterion::Minmaxmax)]
    criterion: Criterion,
    /// Number of sensors for the min-max-max criterion.
    #[arg(long, default_value_t = 3)]
    p: usize,
    /// Grid cell size; defaults to min(a, b) / 200.
    #[arg(long)]
    resolution: Option<f64>,
    /// Zoom passes after the first grid.
    #[arg(long)]
    levels: Option<usize>,
    /// Also write the eccentricity field as CSV to this path.
    #[arg(long)]
    field: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum GenKind {
    /// Random points in the unit square.
    Pmpdc {
        /// Number of points (each is both demand and site).
        #[arg(long)]
        n: usize,
        #[arg(long)]
        p: usize,
        /// Each limit is this quantile of the row's positive distances, in (0, 1].
        #[arg(long, default_value_t = 0.5)]
        quantile: f64,
    },
    /// Independent random approvals.
    Profile {
        /// Voters.
        #[arg(long)]
        n: usize,
        /// Candidates.
        #[arg(long)]
        m: usize,
        /// Probability of each approval.
        #[arg(long, default_value_t = 0.5)]
        density: f64,
        #[arg(long, default_value_t = 1)]
        k: usize,
    },
}

#[derive(Debug, Args)]
struct Gen {
    #[command(subcommand)]
    kind: GenKind,
}

#[derive(Debug, Args)]
struct Bench {
    /// JSON benchmark configuration; missing fields take defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Run the oracle-equivalence checks instead; exits nonzero on any mismatch.
    #[arg(long)]
    selftest: bool,
    /// Write a JSON run summary here.
    #[arg(long)]
    summary: Option<PathBuf>,
    /// Record wall-clock times (tables then differ between runs).
    #[arg(long)]
    timings: bool,
}

/// A finished command: text to emit and the exit code.
struct Output {
    text: String,
    code: i32,
}

/// Field/value pairs rendered as a two-column table or a one-row CSV.
fn record(format: Format, fields: &[(&str, String)]) -> Result<String> {
    match format {
        Format::Table => {
            let rows: Vec<Vec<String>> = fields
                .iter()
                .map(|(k, v)| vec![k.to_string(), v.clone()])
                .collect();
            Ok(render_table(&["field", "value"], &rows))
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            let wrap = |e: csv::Error| Error::Io(std::io::Error::other(e));
            w.write_record(fields.iter().map(|(k, _)| *k))
                .map_err(wrap)?;
            w.write_record(fields.iter().map(|(_, v)| v))
                .map_err(wrap)?;
            let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
            Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
        }
    }
}

fn list<T: ToString>(items: impl IntoIterator<Item = T>) -> String {
    items
        .into_iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| {
        Error::Io(std::io::Error::new(
            e.kind(),
            format!("{}: {e}", path.display()),
        ))
    })
}

fn load_pmedian(args: &InstanceArgs) -> Result<PMedianInstance> {
    let text = read(&args.file)?;
    let inst = if args.orlib {
        let n = text
            .split_whitespace()
            .next()
            .and_then(|t| t.parse::<usize>().ok())
            .unwrap_or(1);
        let rule = CoverageRule {
            beta: args.beta,
            q: args.q.unwrap_or_else(|| CoverageRule::default_for(n).q),
        };
        parse_orlib_pmedian(&text, Some(rule))?
    } else {
        match parse_native(&text)?.body {
            NativeBody::PMedian(i) => i,
            _ => {
                return Err(Error::Parameter(format!(
                    "{} is not a pmpdc file",
                    args.file.display()
                )))
            }
        }
    };
    match args.p {
        Some(p) => inst.with_p(p),
        None => Ok(inst),
    }
}

fn fmt_p_min(p: &PMin) -> String {
    match p {
        PMin::Exact(p) => p.to_string(),
        PMin::Bounds { lower, upper } => format!("{lower}..={upper}"),
        PMin::Unbounded => "none".to_string(),
    }
}

fn witness_code(w: &InfeasibilityWitness) -> i32 {
    if w.is_proof() {
        EXIT_INFEASIBLE
    } else {
        EXIT_NOT_FOUND
    }
}

fn solve_pmpdc(cli: &Cli, cmd: &SolvePmpdc, log: &mut dyn Write) -> Result<Output> {
    let inst = load_pmedian(&cmd.input)?;
    let opts = ExactOptions {
        budget: cmd.budget.into(),
        ..ExactOptions::default()
    };
    let grasp = GraspParams {
        iterations: cmd.iterations,
        rcl_alpha: cmd.alpha,
        seed: cli.seed,
        ..GraspParams::default()
    };
    let mut fields = vec![
        ("solver", format!("{:?}", cmd.solver).to_lowercase()),
        ("p", inst.p().to_string()),
    ];
    let outcome = match cmd.solver {
        PmpdcSolver::Exact => exact_solve_with(&inst, &opts)?,
        PmpdcSolver::Grasp => {
            let (o, report) = grasp_solve(&inst, &grasp)?;
            fields.push(("seed", cli.seed.to_string()));
            if cli.verbose > 0 {
                let _ = writeln!(log, "grasp: {} iterations", report.iterations);
            }
            o
        }
        PmpdcSolver::Lagrangian => {
            let params = LagrangianParams {
                ub_source: UpperBoundSource::Grasp(grasp),
                ..LagrangianParams::default()
            };
            let res = lagrangian_bound(&inst, &params)?;
            fields.push(("lower_bound", res.lower_bound.to_string()));
            if let Some(g) = res.report.gap {
                fields.push(("gap", g.to_string()));
            }
            if cli.verbose > 0 {
                let _ = writeln!(log, "lagrangian: {} iterations", res.report.iterations);
            }
            match res.incumbent {
                Some(sol) => Outcome::Feasible(sol),
                None => match feasibility_check(&inst).witness {
                    Some(w) => Outcome::Infeasible(w),
                    None => Outcome::Infeasible(InfeasibilityWitness::NoFeasibleFound {
                        attempts: res.report.iterations,
                    }),
                },
            }
        }
        PmpdcSolver::Bigm => {
            let m = choose_big_m(&inst);
            let sol = solve_pmp_exact(&transform_distances(&inst, m)?, inst.p(), &opts)?;
            fields.push(("big_m", m.to_string()));
            if sol.objective >= m {
                let w = feasibility_check(&inst).witness.unwrap_or(
                    InfeasibilityWitness::CoverTooLarge {
                        p: inst.p(),
                        p_min: None,
                    },
                );
                Outcome::Infeasible(w)
            } else {
                Outcome::Feasible(crate::pmedian::evaluate(&inst, &sol.open)?)
            }
        }
    };
    let code = match &outcome {
        Outcome::Feasible(sol) => {
            fields.push(("status", "feasible".into()));
            fields.push(("objective", sol.objective.to_string()));
            fields.push(("open", list(&sol.open)));
            fields.push(("assignment", list(&sol.assignment)));
            EXIT_OK
        }
        Outcome::Infeasible(w) => {
            fields.push((
                "status",
                if w.is_proof() {
                    "infeasible"
                } else {
                    "unknown"
                }
                .into(),
            ));
            fields.push(("witness", w.to_string()));
            witness_code(w)
        }
    };
    Ok(Output {
        text: record(cli.format, &fields)?,
        code,
    })
}

fn feascheck(cli: &Cli, args: &InstanceArgs) -> Result<Output> {
    let inst = load_pmedian(args)?;
    let rep = feasibility_check(&inst);
    let mut fields = vec![
        ("p", inst.p().to_string()),
        ("verdict", format!("{:?}", rep.verdict).to_lowercase()),
        ("p_min", fmt_p_min(&rep.p_min)),
    ];
    if let Some(w) = &rep.witness {
        fields.push(("witness", w.to_string()));
    }
    let code = match rep.verdict {
        Verdict::Feasible => EXIT_OK,
        Verdict::Infeasible => EXIT_INFEASIBLE,
        Verdict::Undetermined => EXIT_NOT_FOUND,
    };
    Ok(Output {
        text: record(cli.format, &fields)?,
        code,
    })
}

fn solve_committee(cli: &Cli, cmd: &SolveCommittee) -> Result<Output> {
    let text = read(&cmd.file)?;
    let NativeBody::Approval(file_prob) = parse_native(&text)?.body else {
        return Err(Error::Parameter(format!(
            "{} is not an approval file",
            cmd.file.display()
        )));
    };
    let profile: ApprovalProfile = file_prob.profile().clone();
    let k = match cmd.rule {
        CommitteeRule::KCentrum => cmd.k.unwrap_or(file_prob.k()),
        CommitteeRule::Minimax => 1,
        CommitteeRule::Minisum => profile.n_voters(),
    };
    let mut prob = CommitteeProblem::new(profile.clone(), k)?;
    if let Some(s) = cmd.size {
        prob = prob.with_size(s)?;
    }
    let strategy = if cmd.heuristic {
        Strategy::Heuristic {
            starts: cmd.starts,
            seed: cli.seed,
        }
    } else {
        Strategy::Exact
    };
    let sol = if cmd.rule == CommitteeRule::Minisum && cmd.size.is_none() {
        minisum_solve(&profile)
    } else {
        k_centrum_solve(&prob, strategy)?
    };
    let fields = vec![
        ("rule", format!("{:?}", cmd.rule).to_lowercase()),
        ("k", k.to_string()),
        ("committee", sol.committee.to_string()),
        ("objective", sol.objective.to_string()),
        ("distances", list(&sol.distances)),
    ];
    Ok(Output {
        text: record(cli.format, &fields)?,
        code: EXIT_OK,
    })
}

fn solve_sensors(cli: &Cli, cmd: &SolveSensors) -> Result<Output> {
    let text = read(&cmd.file)?;
    let NativeBody::Sensors(sc) = parse_native(&text)?.body else {
        return Err(Error::Parameter(format!(
            "{} is not a sensors file",
            cmd.file.display()
        )));
    };
    let default = GridSpec::default_for(&sc.rect);
    let grid = GridSpec::new(
        cmd.resolution.unwrap_or(default.resolution),
        cmd.levels.unwrap_or(default.refinement_levels),
    )?;
    if let Some(path) = &cmd.field {
        let mut w =
            csv::Writer::from_path(path).map_err(|e| Error::Io(std::io::Error::other(e)))?;
        for cell in eccentricity_field(&sc.rect, grid.resolution)? {
            w.serialize(cell)
                .map_err(|e| Error::Io(std::io::Error::other(e)))?;
        }
        w.flush()?;
    }
    let sol: SensorSolution = match cmd.criterion {
        Criterion::Minmaxmax => solve_minmaxmax(&sc.rect, cmd.p, sc.delta, &grid)?,
        Criterion::MaxArea => solve_max_area(&sc.rect, sc.range, &grid)?,
        Criterion::Weighted => solve_weighted_area(&sc.rect, &sc.zones, &grid)?,
    };
    let fields = vec![
        ("criterion", format!("{:?}", cmd.criterion).to_lowercase()),
        ("objective", sol.objective.to_string()),
        (
            "sensors",
            sol.sensors
                .points()
                .iter()
                .map(|q| format!("({}, {})", q.x, q.y))
                .collect::<Vec<_>>()
                .join(" "),
        ),
        ("min_separation", sol.sensors.min_separation().to_string()),
    ];
    Ok(Output {
        text: record(cli.format, &fields)?,
        code: EXIT_OK,
    })
}

fn gen(cli: &Cli, cmd: &Gen) -> Result<Output> {
    let mut file = match cmd.kind {
        GenKind::Pmpdc { n, p, quantile } => NativeFile::new(NativeBody::PMedian(
            crate::io::generate_pmpdc(cli.seed, n, p, quantile)?,
        )),
        GenKind::Profile { n, m, density, k } => NativeFile::new(NativeBody::Approval(
            CommitteeProblem::new(crate::io::generate_profiles(cli.seed, n, m, density)?, k)?,
        )),
    };
    file.metadata.insert("seed".into(), cli.seed.to_string());
    Ok(Output {
        text: to_native_string(&file),
        code: EXIT_OK,
    })
}

fn bench(cli: &Cli, cmd: &Bench) -> Result<Output> {
    if cmd.selftest {
        let rep = run_selftest(cli.seed)?;
        let text = match cli.format {
            Format::Table => rep.to_table(),
            Format::Csv => rep.to_csv()?,
        };
        return Ok(Output {
            text,
            code: if rep.passed() {
                EXIT_OK
            } else {
                EXIT_NOT_FOUND
            },
        });
    }
    let mut config = match &cmd.config {
        Some(path) => serde_json::from_str::<BenchConfig>(&read(path)?)
            .map_err(|e| Error::Parameter(format!("{}: {e}", path.display())))?,
        None => BenchConfig {
            seed: cli.seed,
            ..BenchConfig::default()
        },
    };
    config.record_timings |= cmd.timings;
    let table = run_benchmark(&config)?;
    if let Some(path) = &cmd.summary {
        let json = serde_json::to_string_pretty(&table.summary(&config))
            .map_err(|e| Error::Io(e.into()))?;
        fs::write(path, json + "\n")?;
    }
    let text = match cli.format {
        Format::Table => table.to_table(),
        Format::Csv => table.to_csv()?,
    };
    Ok(Output {
        text,
        code: EXIT_OK,
    })
}

fn error_code(e: &Error) -> i32 {
    match e {
        Error::Budget { .. } => EXIT_BUDGET,
        Error::Separation { .. } | Error::EmptyCoverage { .. } => EXIT_INFEASIBLE,
        _ => EXIT_INPUT,
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let rendered = e.render().to_string();
            let _ = if code == EXIT_OK {
                stdout.write_all(rendered.as_bytes())
            } else {
                stderr.write_all(rendered.as_bytes())
            };
            return code;
        }
    };
    let result = match &cli.command {
        Command::SolvePmpdc(c) => solve_pmpdc(&cli, c, stderr),
        Command::SolveCommittee(c) => solve_committee(&cli, c),
        Command::SolveSensors(c) => solve_sensors(&cli, c),
        Command::Feascheck(c) => feascheck(&cli, c),
        Command::Gen(c) => gen(&cli, c),
        Command::Bench(c) => bench(&cli, c),
    };
    match result {
        Ok(out) => {
            let written = match &cli.out {
                Some(path) => fs::write(path, &out.text),
                None => stdout.write_all(out.text.as_bytes()),
            };
            if let Err(e) = written {
                let _ = writeln!(stderr, "error: {e}");
                return EXIT_INPUT;
            }
            out.code
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            error_code(&e)
        }
    }
}
