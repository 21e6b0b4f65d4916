//! Python module `itp`: instances, scenario evaluation and every solver.

use itp_core::encoding::{decode, fitness, Configuration, FitnessCache};
use itp_core::exact::{exact_worst_with, grid_oracle_worst, ExactOptions};
use itp_core::heuristics::{
    exact_report, genetic as run_genetic, memetic as run_memetic, run_local_search, GaParams,
    LsPolicy, RunReport, Selection,
};
use itp_core::instance::{
    generate_random, load_instance, read_instance, save_instance, Feasibility, Format, InstanceData,
    IntervalTpInstance, Scenario,
};
use itp_core::transport;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

fn err(e: itp_core::Error) -> PyErr {
    if e.is_data_error() || matches!(e, itp_core::Error::InvalidParameter(_)) {
        PyValueError::new_err(e.to_string())
    } else {
        PyRuntimeError::new_err(e.to_string())
    }
}

fn config(text: &str) -> PyResult<Configuration> {
    text.parse().map_err(err)
}

/// Interval transportation problem.
#[pyclass(name = "Instance", module = "itp", frozen)]
struct PyInstance {
    inner: IntervalTpInstance,
}

#[pymethods]
impl PyInstance {
    #[new]
    #[pyo3(signature = (cost_lo, cost_hi, supply_lo, supply_hi, demand_lo, demand_hi, name = String::new()))]
    fn new(
        cost_lo: Vec<Vec<i64>>,
        cost_hi: Vec<Vec<i64>>,
        supply_lo: Vec<i64>,
        supply_hi: Vec<i64>,
        demand_lo: Vec<i64>,
        demand_hi: Vec<i64>,
        name: String,
    ) -> PyResult<Self> {
        let data = InstanceData {
            m: supply_lo.len(),
            n: demand_lo.len(),
            name,
            cost_lo,
            cost_hi,
            supply_lo,
            supply_hi,
            demand_lo,
            demand_hi,
        };
        Ok(Self {
            inner: IntervalTpInstance::try_from(data).map_err(err)?,
        })
    }

    /// Parses the canonical JSON format.
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let inner = read_instance(text.as_bytes(), Format::CanonicalJson).map_err(err)?;
        Ok(Self { inner })
    }

    /// Reads a `.json` or `.csv` instance file.
    #[staticmethod]
    fn load(path: &str) -> PyResult<Self> {
        Ok(Self {
            inner: load_instance(path).map_err(err)?,
        })
    }

    /// Random instance with doubled upper bounds.
    #[staticmethod]
    #[pyo3(signature = (m, n, seed = 0, cost = (1, 20), supply = (10, 50), demand = (10, 50)))]
    fn generate(
        m: usize,
        n: usize,
        seed: u64,
        cost: (i64, i64),
        supply: (i64, i64),
        demand: (i64, i64),
    ) -> PyResult<Self> {
        Ok(Self {
            inner: generate_random(m, n, cost, supply, demand, seed).map_err(err)?,
        })
    }

    fn save(&self, path: &str) -> PyResult<()> {
        save_instance(&self.inner, path).map_err(err)
    }

    fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.inner.to_data()).expect("instance serializes")
    }

    #[getter]
    fn name(&self) -> &str {
        self.inner.name()
    }

    #[getter]
    fn m(&self) -> usize {
        self.inner.m()
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    /// `"no-feasible"`, `"all-feasible"` or `"mixed"`.
    fn feasibility(&self) -> &'static str {
        match self.inner.classify_feasibility() {
            Feasibility::NoFeasibleScenario => "no-feasible",
            Feasibility::AllScenariosFeasible => "all-feasible",
            Feasibility::Mixed => "mixed",
        }
    }

    /// Scenario encoded by a sign string such as `"0+-"`:
    /// `(supply, demand, balanced, feasible)`.
    fn decode(&self, configuration: &str) -> PyResult<(Vec<i64>, Vec<i64>, bool, bool)> {
        let c = config(configuration)?;
        c.check_dim(&self.inner).map_err(err)?;
        let d = decode(&self.inner, &c);
        Ok((d.scenario.supply, d.scenario.demand, d.balanced, d.feasible))
    }

    /// Optimal value of the encoded scenario, repairing it if infeasible.
    fn fitness(&self, configuration: &str) -> PyResult<i64> {
        let c = config(configuration)?;
        fitness(&self.inner, &c, &mut FitnessCache::unmemoized()).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!("Instance(name={:?}, m={}, n={})", self.inner.name(), self.inner.m(), self.inner.n())
    }
}

/// Result of one solver run.
#[pyclass(name = "RunReport", module = "itp", frozen)]
struct PyRunReport {
    inner: RunReport,
}

#[pymethods]
impl PyRunReport {
    #[getter]
    fn algorithm(&self) -> &'static str {
        self.inner.algorithm.as_str()
    }

    #[getter]
    fn seed(&self) -> u64 {
        self.inner.seed
    }

    #[getter]
    fn best_value(&self) -> i64 {
        self.inner.best_value
    }

    #[getter]
    fn best_config(&self) -> Option<String> {
        self.inner.best_config.as_ref().map(ToString::to_string)
    }

    #[getter]
    fn best_supply(&self) -> Vec<i64> {
        self.inner.best_supply.clone()
    }

    #[getter]
    fn best_demand(&self) -> Vec<i64> {
        self.inner.best_demand.clone()
    }

    #[getter]
    fn lp_count(&self) -> u64 {
        self.inner.lp_count
    }

    #[getter]
    fn iterations(&self) -> u64 {
        self.inner.iterations
    }

    #[getter]
    fn generations(&self) -> u64 {
        self.inner.generations
    }

    #[getter]
    fn wall_time(&self) -> f64 {
        self.inner.wall_time_secs
    }

    /// `(seconds, best value so far)` pairs.
    #[getter]
    fn value_trace(&self) -> Vec<(f64, i64)> {
        self.inner.value_trace.iter().map(|p| (p.time_secs, p.value)).collect()
    }

    /// JSON text; `timing=False` zeroes wall-clock fields.
    #[pyo3(signature = (timing = true))]
    fn to_json(&self, timing: bool) -> String {
        if timing {
            self.inner.to_json()
        } else {
            self.inner.without_timing().to_json()
        }
    }

    fn __repr__(&self) -> String {
        format!(
            "RunReport(algorithm={:?}, best_value={}, lp_count={})",
            self.inner.algorithm.as_str(),
            self.inner.best_value,
            self.inner.lp_count
        )
    }
}

fn report(inner: RunReport) -> PyRunReport {
    PyRunReport { inner }
}

/// Optimal value of a transportation LP, or `None` if infeasible.
#[pyfunction]
fn evaluate(cost: Vec<Vec<i64>>, supply: Vec<i64>, demand: Vec<i64>) -> PyResult<Option<i64>> {
    let sc = Scenario::new(cost, supply, demand);
    Ok(transport::evaluate(&sc).map_err(err)?.objective)
}

/// Worst finite optimal value by full enumeration.
#[pyfunction]
#[pyo3(signature = (instance, shortcut = true, max_dim = itp_core::exact::DEFAULT_MAX_DIM))]
fn exact_worst(instance: &PyInstance, shortcut: bool, max_dim: usize) -> PyResult<PyRunReport> {
    let clock = std::time::Instant::now();
    let opts = ExactOptions {
        max_dim,
        all_feasible_shortcut: shortcut,
        ..Default::default()
    };
    let res = exact_worst_with(&instance.inner, &opts).map_err(err)?;
    Ok(report(exact_report(&instance.inner, &res, clock.elapsed().as_secs_f64())))
}

/// Worst value over every integer point of the supply/demand box.
#[pyfunction]
fn grid_oracle(instance: &PyInstance) -> PyResult<i64> {
    grid_oracle_worst(&instance.inner).map_err(err)
}

fn policy(name: &str) -> PyResult<LsPolicy> {
    match name {
        "first" => Ok(LsPolicy::First),
        "best" => Ok(LsPolicy::Best),
        other => Err(PyValueError::new_err(format!("unknown policy `{other}`"))),
    }
}

#[pyfunction]
#[pyo3(signature = (instance, policy = "first", seed = 0, cap = None, time_limit = None))]
fn local_search(
    instance: &PyInstance,
    policy: &str,
    seed: u64,
    cap: Option<u64>,
    time_limit: Option<f64>,
) -> PyResult<PyRunReport> {
    let p = self::policy(policy)?;
    Ok(report(run_local_search(&instance.inner, p, seed, cap, time_limit).map_err(err)?))
}

#[allow(clippy::too_many_arguments)]
fn params(
    seed: u64,
    pop: usize,
    tga: usize,
    pc: f64,
    pm_balanced: f64,
    pm_unbalanced: f64,
    pls: f64,
    tls: Option<u64>,
    ls_policy: &str,
    selection: &str,
    tournament_size: usize,
    fps3_ratio: f64,
    elite: usize,
    time_limit: Option<f64>,
) -> PyResult<GaParams> {
    let selection = match selection {
        "fps1" => Selection::Fps1,
        "fps2" => Selection::Fps2,
        "fps3" => Selection::Fps3 { ratio: fps3_ratio },
        "tournament" => Selection::Tournament {
            size: tournament_size,
        },
        other => return Err(PyValueError::new_err(format!("unknown selection `{other}`"))),
    };
    Ok(GaParams {
        pop_size: pop,
        stall_limit: tga,
        prob_crossover: pc,
        prob_mutation_balanced: pm_balanced,
        prob_mutation_unbalanced: pm_unbalanced,
        prob_local_search: pls,
        ls_iteration_cap: tls,
        ls_policy: policy(ls_policy)?,
        selection,
        elite_count: elite,
        seed,
        time_limit_secs: time_limit,
    })
}

#[pyfunction]
#[pyo3(signature = (
    instance, seed = 0, pop = 30, tga = 20, pc = 1.0, pm_balanced = 0.1, pm_unbalanced = 0.7,
    selection = "tournament", tournament_size = 3, fps3_ratio = 4.0, elite = 0, time_limit = None
))]
#[allow(clippy::too_many_arguments)]
fn genetic(
    instance: &PyInstance,
    seed: u64,
    pop: usize,
    tga: usize,
    pc: f64,
    pm_balanced: f64,
    pm_unbalanced: f64,
    selection: &str,
    tournament_size: usize,
    fps3_ratio: f64,
    elite: usize,
    time_limit: Option<f64>,
) -> PyResult<PyRunReport> {
    let p = params(
        seed, pop, tga, pc, pm_balanced, pm_unbalanced, 0.0, None, "first", selection,
        tournament_size, fps3_ratio, elite, time_limit,
    )?;
    Ok(report(run_genetic(&instance.inner, &p).map_err(err)?))
}

#[pyfunction]
#[pyo3(signature = (
    instance, seed = 0, pop = 30, tga = 20, pc = 1.0, pm_balanced = 0.1, pm_unbalanced = 0.7,
    pls = 0.7, tls = None, ls_policy = "first", selection = "tournament", tournament_size = 3,
    fps3_ratio = 4.0, elite = 0, time_limit = None
))]
#[allow(clippy::too_many_arguments)]
fn memetic(
    instance: &PyInstance,
    seed: u64,
    pop: usize,
    tga: usize,
    pc: f64,
    pm_balanced: f64,
    pm_unbalanced: f64,
    pls: f64,
    tls: Option<u64>,
    ls_policy: &str,
    selection: &str,
    tournament_size: usize,
    fps3_ratio: f64,
    elite: usize,
    time_limit: Option<f64>,
) -> PyResult<PyRunReport> {
    let p = params(
        seed, pop, tga, pc, pm_balanced, pm_unbalanced, pls, tls, ls_policy, selection,
        tournament_size, fps3_ratio, elite, time_limit,
    )?;
    Ok(report(run_memetic(&instance.inner, &p).map_err(err)?))
}

#[pymodule]
fn itp(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyInstance>()?;
    m.add_class::<PyRunReport>()?;
    m.add_function(wrap_pyfunction!(evaluate, m)?)?;
    m.add_function(wrap_pyfunction!(exact_worst, m)?)?;
    m.add_function(wrap_pyfunction!(grid_oracle, m)?)?;
    m.add_function(wrap_pyfunction!(local_search, m)?)?;
    m.add_function(wrap_pyfunction!(genetic, m)?)?;
    m.add_function(wrap_pyfunction!(memetic, m)?)?;
    Ok(())
}
