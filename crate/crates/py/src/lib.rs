//! Python bindings. Instances and solutions are wrapped as classes; sensor
//! results come back as `(points, objective)` tuples.

use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyOSError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use locopt::committee::{self, CommitteeProblem, Strategy};
use locopt::io::{self, CoverageRule, NativeBody, NativeFile};
use locopt::pmedian::{self, ExactOptions, GraspParams, LagrangianParams, Outcome, PMin};
use locopt::sensors::{self, GridSpec, Point, Rect, ZonePartition};
use locopt::{Committee, DistanceMatrix, Error};

create_exception!(
    locopt,
    LocoptError,
    PyException,
    "Base class for solver errors."
);
create_exception!(
    locopt,
    InfeasibleError,
    LocoptError,
    "The instance admits no feasible solution."
);
create_exception!(
    locopt,
    BudgetError,
    LocoptError,
    "Exact enumeration would exceed its budget."
);

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Budget { .. } => BudgetError::new_err(e.to_string()),
        Error::Separation { .. } | Error::EmptyCoverage { .. } => {
            InfeasibleError::new_err(e.to_string())
        }
        Error::Io(io) => PyOSError::new_err(io.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

trait OrPy<T> {
    fn py(self) -> PyResult<T>;
}

impl<T> OrPy<T> for locopt::Result<T> {
    fn py(self) -> PyResult<T> {
        self.map_err(to_py)
    }
}

#[pyclass(name = "PMedianInstance", module = "locopt", frozen, from_py_object)]
#[derive(Clone)]
struct PyPMedian(pmedian::PMedianInstance);

#[pymethods]
impl PyPMedian {
    #[new]
    fn new(distances: Vec<Vec<f64>>, p: usize, limits: Vec<f64>) -> PyResult<Self> {
        let dm = DistanceMatrix::from_rows(&distances).py()?;
        Ok(Self(pmedian::PMedianInstance::new(dm, p, limits).py()?))
    }

    #[staticmethod]
    fn from_native(text: &str) -> PyResult<Self> {
        match io::parse_native(text).py()?.body {
            NativeBody::PMedian(i) => Ok(Self(i)),
            _ => Err(PyValueError::new_err("not a pmpdc file")),
        }
    }

    /// OR-Library pmed text; limits default to 1.1 times the ceil(m/10)-th smallest row entry.
    #[staticmethod]
    #[pyo3(signature = (text, beta=1.1, q=None))]
    fn from_orlib(text: &str, beta: f64, q: Option<usize>) -> PyResult<Self> {
        let rule = q.map(|q| CoverageRule { beta, q });
        let rule = match rule {
            Some(r) => Some(r),
            None if beta != 1.1 => {
                let n = text
                    .split_whitespace()
                    .next()
                    .and_then(|t| t.parse().ok())
                    .unwrap_or(1);
                Some(CoverageRule {
                    beta,
                    ..CoverageRule::default_for(n)
                })
            }
            None => None,
        };
        Ok(Self(io::parse_orlib_pmedian(text, rule).py()?))
    }

    #[staticmethod]
    #[pyo3(signature = (seed, n, p, quantile=0.5))]
    fn generate(seed: u64, n: usize, p: usize, quantile: f64) -> PyResult<Self> {
        Ok(Self(io::generate_pmpdc(seed, n, p, quantile).py()?))
    }

    fn to_native(&self) -> String {
        io::to_native_string(&NativeFile::new(NativeBody::PMedian(self.0.clone())))
    }

    fn with_p(&self, p: usize) -> PyResult<Self> {
        Ok(Self(self.0.with_p(p).py()?))
    }

    #[getter]
    fn p(&self) -> usize {
        self.0.p()
    }

    #[getter]
    fn n_demand(&self) -> usize {
        self.0.n_demand()
    }

    #[getter]
    fn n_sites(&self) -> usize {
        self.0.n_sites()
    }

    #[getter]
    fn limits(&self) -> Vec<f64> {
        self.0.limits().to_vec()
    }

    #[getter]
    fn distances(&self) -> Vec<Vec<f64>> {
        self.0.distances().rows().map(<[f64]>::to_vec).collect()
    }

    fn __repr__(&self) -> String {
        format!(
            "PMedianInstance(n_demand={}, n_sites={}, p={})",
            self.0.n_demand(),
            self.0.n_sites(),
            self.0.p()
        )
    }
}

#[pyclass(name = "LocationSolution", module = "locopt", frozen, get_all)]
struct PyLocation {
    open: Vec<usize>,
    assignment: Vec<usize>,
    objective: f64,
    feasible: bool,
}

impl From<pmedian::LocationSolution> for PyLocation {
    fn from(s: pmedian::LocationSolution) -> Self {
        Self {
            open: s.open,
            assignment: s.assignment,
            objective: s.objective,
            feasible: s.feasible,
        }
    }
}

#[pymethods]
impl PyLocation {
    fn __repr__(&self) -> String {
        format!(
            "LocationSolution(open={:?}, objective={})",
            self.open, self.objective
        )
    }
}

fn feasible_or_raise(outcome: Outcome) -> PyResult<PyLocation> {
    match outcome {
        Outcome::Feasible(s) => Ok(s.into()),
        Outcome::Infeasible(w) => Err(InfeasibleError::new_err(w.to_string())),
    }
}

/// Optimal solution; raises InfeasibleError with the witness when none exists.
#[pyfunction]
#[pyo3(signature = (inst, budget=10_000_000))]
fn exact_solve(inst: &PyPMedian, budget: u64) -> PyResult<PyLocation> {
    let opts = ExactOptions {
        budget: budget.into(),
        ..ExactOptions::default()
    };
    feasible_or_raise(pmedian::exact_solve_with(&inst.0, &opts).py()?)
}

#[pyfunction]
#[pyo3(signature = (inst, iterations=50, alpha=0.15, seed=0))]
fn grasp_solve(inst: &PyPMedian, iterations: usize, alpha: f64, seed: u64) -> PyResult<PyLocation> {
    let params = GraspParams {
        iterations,
        rcl_alpha: alpha,
        seed,
        ..GraspParams::default()
    };
    feasible_or_raise(pmedian::grasp_solve(&inst.0, &params).py()?.0)
}

/// Returns `(lower_bound, incumbent or None)`.
#[pyfunction]
#[pyo3(signature = (inst, max_iters=500))]
fn lagrangian_bound(inst: &PyPMedian, max_iters: usize) -> PyResult<(f64, Option<PyLocation>)> {
    let params = LagrangianParams {
        max_iters,
        ..LagrangianParams::default()
    };
    let res = pmedian::lagrangian_bound(&inst.0, &params).py()?;
    Ok((res.lower_bound, res.incumbent.map(Into::into)))
}

/// Dict with `verdict`, `p_min` (int or None), `p_min_bounds` and `witness`.
#[pyfunction]
fn feasibility_check<'py>(py: Python<'py>, inst: &PyPMedian) -> PyResult<Bound<'py, PyDict>> {
    let rep = pmedian::feasibility_check(&inst.0);
    let d = PyDict::new(py);
    d.set_item("verdict", format!("{:?}", rep.verdict).to_lowercase())?;
    let (exact, bounds) = match rep.p_min {
        PMin::Exact(p) => (Some(p), Some((p, p))),
        PMin::Bounds { lower, upper } => (None, Some((lower, upper))),
        PMin::Unbounded => (None, None),
    };
    d.set_item("p_min", exact)?;
    d.set_item("p_min_bounds", bounds)?;
    d.set_item("witness", rep.witness.map(|w| w.to_string()))?;
    Ok(d)
}

#[pyfunction]
fn choose_big_m(inst: &PyPMedian) -> f64 {
    pmedian::choose_big_m(&inst.0)
}

/// Distance matrix with every over-limit entry replaced by `big_m`.
#[pyfunction]
fn transform_distances(inst: &PyPMedian, big_m: f64) -> PyResult<Vec<Vec<f64>>> {
    let dm = pmedian::transform_distances(&inst.0, big_m).py()?;
    Ok(dm.rows().map(<[f64]>::to_vec).collect())
}

#[pyclass(name = "ApprovalProfile", module = "locopt", frozen, from_py_object)]
#[derive(Clone)]
struct PyProfile(locopt::ApprovalProfile);

#[pymethods]
impl PyProfile {
    /// Rows as bit-strings such as `"101"`.
    #[new]
    fn new(rows: Vec<String>) -> PyResult<Self> {
        Ok(Self(locopt::ApprovalProfile::from_bit_strings(&rows).py()?))
    }

    #[staticmethod]
    #[pyo3(signature = (seed, n, m, density=0.5))]
    fn generate(seed: u64, n: usize, m: usize, density: f64) -> PyResult<Self> {
        Ok(Self(io::generate_profiles(seed, n, m, density).py()?))
    }

    #[getter]
    fn n_voters(&self) -> usize {
        self.0.n_voters()
    }

    #[getter]
    fn m_candidates(&self) -> usize {
        self.0.m_candidates()
    }

    #[getter]
    fn rows(&self) -> Vec<String> {
        self.0
            .rows()
            .iter()
            .map(|r| r.iter().map(|&b| if b { '1' } else { '0' }).collect())
            .collect()
    }
}

#[pyclass(name = "CommitteeSolution", module = "locopt", frozen, get_all)]
struct PyCommittee {
    committee: String,
    objective: usize,
    distances: Vec<usize>,
}

impl From<committee::CommitteeSolution> for PyCommittee {
    fn from(s: committee::CommitteeSolution) -> Self {
        Self {
            committee: s.committee.to_string(),
            objective: s.objective,
            distances: s.distances,
        }
    }
}

#[pymethods]
impl PyCommittee {
    fn __repr__(&self) -> String {
        format!(
            "CommitteeSolution(committee='{}', objective={})",
            self.committee, self.objective
        )
    }
}

fn strategy(heuristic: bool, starts: usize, seed: u64) -> Strategy {
    if heuristic {
        Strategy::Heuristic { starts, seed }
    } else {
        Strategy::Exact
    }
}

/// Sum of the `k` largest voter distances to `committee`.
#[pyfunction]
fn objective_value(profile: &PyProfile, k: usize, committee: &str) -> PyResult<usize> {
    let prob = CommitteeProblem::new(profile.0.clone(), k).py()?;
    committee::objective_value(&prob, &Committee::parse(committee).py()?).py()
}

#[pyfunction]
#[pyo3(signature = (profile, k, heuristic=false, starts=32, seed=0, size=None))]
fn k_centrum_solve(
    profile: &PyProfile,
    k: usize,
    heuristic: bool,
    starts: usize,
    seed: u64,
    size: Option<usize>,
) -> PyResult<PyCommittee> {
    let mut prob = CommitteeProblem::new(profile.0.clone(), k).py()?;
    if let Some(s) = size {
        prob = prob.with_size(s).py()?;
    }
    Ok(
        committee::k_centrum_solve(&prob, strategy(heuristic, starts, seed))
            .py()?
            .into(),
    )
}

#[pyfunction]
fn minisum_solve(profile: &PyProfile) -> PyCommittee {
    committee::minisum_solve(&profile.0).into()
}

#[pyfunction]
#[pyo3(signature = (profile, heuristic=false, starts=32, seed=0))]
fn minimax_solve(
    profile: &PyProfile,
    heuristic: bool,
    starts: usize,
    seed: u64,
) -> PyResult<PyCommittee> {
    Ok(
        committee::minimax_solve(&profile.0, strategy(heuristic, starts, seed))
            .py()?
            .into(),
    )
}

type Sensors = (Vec<(f64, f64)>, f64);

fn grid_for(rect: &Rect, resolution: Option<f64>, levels: Option<usize>) -> PyResult<GridSpec> {
    let d = GridSpec::default_for(rect);
    GridSpec::new(
        resolution.unwrap_or(d.resolution),
        levels.unwrap_or(d.refinement_levels),
    )
    .py()
}

fn unpack(sol: sensors::SensorSolution) -> Sensors {
    (
        sol.sensors.points().iter().map(|q| (q.x, q.y)).collect(),
        sol.objective,
    )
}

#[pyfunction]
fn eccentricity(x: f64, y: f64, a: f64, b: f64) -> PyResult<f64> {
    Ok(sensors::eccentricity(
        Point::new(x, y),
        &Rect::new(a, b).py()?,
    ))
}

#[pyfunction]
fn coverage_feasible(x: f64, y: f64, a: f64, b: f64, threshold: f64) -> PyResult<bool> {
    Ok(sensors::coverage_feasible(
        Point::new(x, y),
        &Rect::new(a, b).py()?,
        threshold,
    ))
}

#[pyfunction]
#[pyo3(signature = (a, b, p=3, delta=0.01, resolution=None, levels=None))]
fn solve_minmaxmax(
    a: f64,
    b: f64,
    p: usize,
    delta: f64,
    resolution: Option<f64>,
    levels: Option<usize>,
) -> PyResult<Sensors> {
    let rect = Rect::new(a, b).py()?;
    let grid = grid_for(&rect, resolution, levels)?;
    Ok(unpack(
        sensors::solve_minmaxmax(&rect, p, delta, &grid).py()?,
    ))
}

#[pyfunction]
#[pyo3(signature = (a, b, threshold, resolution=None, levels=None))]
fn solve_max_area(
    a: f64,
    b: f64,
    threshold: f64,
    resolution: Option<f64>,
    levels: Option<usize>,
) -> PyResult<Sensors> {
    let rect = Rect::new(a, b).py()?;
    let grid = grid_for(&rect, resolution, levels)?;
    Ok(unpack(
        sensors::solve_max_area(&rect, threshold, &grid).py()?,
    ))
}

#[pyfunction]
#[pyo3(signature = (a, b, cuts, weights, resolution=None, levels=None))]
fn solve_weighted_area(
    a: f64,
    b: f64,
    cuts: Vec<f64>,
    weights: Vec<f64>,
    resolution: Option<f64>,
    levels: Option<usize>,
) -> PyResult<Sensors> {
    let rect = Rect::new(a, b).py()?;
    let zones = ZonePartition::new(&rect, &cuts, &weights).py()?;
    let grid = grid_for(&rect, resolution, levels)?;
    Ok(unpack(
        sensors::solve_weighted_area(&rect, &zones, &grid).py()?,
    ))
}

#[pyfunction]
fn zone_weighted_value(
    a: f64,
    b: f64,
    cuts: Vec<f64>,
    weights: Vec<f64>,
    points: Vec<(f64, f64)>,
) -> PyResult<f64> {
    let rect = Rect::new(a, b).py()?;
    let zones = ZonePartition::new(&rect, &cuts, &weights).py()?;
    let pts: Vec<Point> = points.into_iter().map(|(x, y)| Point::new(x, y)).collect();
    sensors::zone_weighted_value(&rect, &zones, &pts).py()
}

/// Oracle-equivalence checks; returns `(passed, table)`.
#[pyfunction]
#[pyo3(signature = (seed=0))]
fn selftest(seed: u64) -> PyResult<(bool, String)> {
    let rep = locopt::selftest::run_selftest(seed).py()?;
    Ok((rep.passed(), rep.to_table()))
}

#[pymodule]
#[pyo3(name = "locopt")]
fn locopt_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    let py = m.py();
    m.add("LocoptError", py.get_type::<LocoptError>())?;
    m.add("InfeasibleError", py.get_type::<InfeasibleError>())?;
    m.add("BudgetError", py.get_type::<BudgetError>())?;
    m.add_class::<PyPMedian>()?;
    m.add_class::<PyLocation>()?;
    m.add_class::<PyProfile>()?;
    m.add_class::<PyCommittee>()?;
    m.add_function(wrap_pyfunction!(exact_solve, m)?)?;
    m.add_function(wrap_pyfunction!(grasp_solve, m)?)?;
    m.add_function(wrap_pyfunction!(lagrangian_bound, m)?)?;
    m.add_function(wrap_pyfunction!(feasibility_check, m)?)?;
    m.add_function(wrap_pyfunction!(choose_big_m, m)?)?;
    m.add_function(wrap_pyfunction!(transform_distances, m)?)?;
    m.add_function(wrap_pyfunction!(objective_value, m)?)?;
    m.add_function(wrap_pyfunction!(k_centrum_solve, m)?)?;
    m.add_function(wrap_pyfunction!(minisum_solve, m)?)?;
    m.add_function(wrap_pyfunction!(minimax_solve, m)?)?;
    m.add_function(wrap_pyfunction!(eccentricity, m)?)?;
    m.add_function(wrap_pyfunction!(coverage_feasible, m)?)?;
    m.add_function(wrap_pyfunction!(solve_minmaxmax, m)?)?;
    m.add_function(wrap_pyfunction!(solve_max_area, m)?)?;
    m.add_function(wrap_pyfunction!(solve_weighted_area, m)?)?;
    m.add_function(wrap_pyfunction!(zone_weighted_value, m)?)?;
    m.add_function(wrap_pyfunction!(selftest, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
