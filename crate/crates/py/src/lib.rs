//! Python bindings. Similarities cross the boundary as floats rounded to
//! millionths; exact values are available as decimal strings.

use pyo3::exceptions::{PyOSError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use spassign_core::generators::{self, Family};
use spassign_core::partition::{self as algos, Algorithm};
use spassign_core::solver::optimum;
use spassign_core::{io, oracles, stats, Assignment, Error, Loads, Partition, Score};

fn err(e: Error) -> PyErr {
    match e.exit_code() {
        2 => PyValueError::new_err(e.to_string()),
        1 if matches!(e, Error::Io { .. }) => PyOSError::new_err(e.to_string()),
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

fn family(name: &str) -> PyResult<Family> {
    name.parse().map_err(err)
}

fn scores(xs: &[f64]) -> Vec<Score> {
    xs.iter().map(|&x| Score::from_f64(x)).collect()
}

#[pyclass(name = "Instance", frozen)]
struct PyInstance {
    inner: spassign_core::Instance,
}

#[pymethods]
impl PyInstance {
    /// One-to-one instance: agent `i` authors paper `i`.
    #[staticmethod]
    fn one_to_one(similarity: Vec<Vec<f64>>, k: usize) -> PyResult<Self> {
        let inner = spassign_core::Instance::one_to_one_from_rows(&similarity, k).map_err(err)?;
        Ok(PyInstance { inner })
    }

    /// Arbitrary authorship given as `(agent, paper)` pairs.
    #[staticmethod]
    fn general(
        similarity: Vec<Vec<f64>>,
        authorship: Vec<(usize, usize)>,
        agent_load: usize,
        paper_load: usize,
    ) -> PyResult<Self> {
        let n_agents = similarity.len();
        let n_papers = similarity.first().map_or(0, Vec::len);
        if similarity.iter().any(|r| r.len() != n_papers) {
            return Err(PyValueError::new_err("similarity rows differ in length"));
        }
        let sim = scores(&similarity.concat());
        let loads = Loads { agent: agent_load, paper: paper_load };
        let inner = spassign_core::Instance::general(n_agents, n_papers, &sim, &authorship, loads).map_err(err)?;
        Ok(PyInstance { inner })
    }

    /// Reads a manifest and the files it names.
    #[staticmethod]
    fn read(path: std::path::PathBuf) -> PyResult<Self> {
        Ok(PyInstance { inner: io::read_instance(&path).map_err(err)? })
    }

    fn write(&self, path: std::path::PathBuf) -> PyResult<()> {
        io::write_instance(&path, &self.inner).map_err(err)
    }

    fn with_k(&self, k: usize) -> PyResult<Self> {
        Ok(PyInstance { inner: self.inner.with_k(k).map_err(err)? })
    }

    /// Marks agents with more than `threshold` papers as non-reviewers.
    fn remove_heavy_authors(&self, threshold: usize) -> PyResult<Self> {
        let inner = spassign_core::general::remove_heavy_authors(&self.inner, threshold).map_err(err)?;
        Ok(PyInstance { inner })
    }

    #[getter]
    fn n_agents(&self) -> usize {
        self.inner.n_agents()
    }

    #[getter]
    fn n_papers(&self) -> usize {
        self.inner.n_papers()
    }

    #[getter]
    fn mode(&self) -> &'static str {
        self.inner.mode().as_str()
    }

    #[getter]
    fn agent_load(&self) -> usize {
        self.inner.loads().agent
    }

    #[getter]
    fn paper_load(&self) -> usize {
        self.inner.loads().paper
    }

    fn sim(&self, agent: usize, paper: usize) -> PyResult<f64> {
        if agent >= self.inner.n_agents() || paper >= self.inner.n_papers() {
            return Err(PyValueError::new_err("index out of range"));
        }
        Ok(self.inner.sim(agent, paper).to_f64())
    }

    fn similarity(&self) -> Vec<Vec<f64>> {
        self.inner
            .similarity_rows()
            .into_iter()
            .map(|r| r.into_iter().map(Score::to_f64).collect())
            .collect()
    }

    fn authorship(&self) -> Vec<(usize, usize)> {
        self.inner.authorship_pairs()
    }

    fn __repr__(&self) -> String {
        format!(
            "Instance(mode={}, agents={}, papers={}, loads=({}, {}))",
            self.inner.mode().as_str(),
            self.inner.n_agents(),
            self.inner.n_papers(),
            self.inner.loads().agent,
            self.inner.loads().paper
        )
    }
}

/// Output of a partitioning algorithm. Indices at or beyond the original
/// agent count refer to padding agents.
#[pyclass(name = "PartitionResult", frozen, get_all)]
struct PyPartitionResult {
    algorithm: String,
    seed: Option<u64>,
    pairs: Vec<(usize, usize)>,
    subsets: Vec<Vec<usize>>,
    paper_subsets: Option<Vec<Vec<usize>>>,
    dummy_agents: usize,
    value: f64,
    value_exact: String,
    opt: f64,
    /// `(numerator, denominator)` of the fraction of the optimum lost.
    loss_fraction: (i64, i64),
}

#[pymethods]
impl PyPartitionResult {
    fn __repr__(&self) -> String {
        format!(
            "PartitionResult(algorithm={}, value={}, loss={}/{}, subsets={})",
            self.algorithm,
            self.value_exact,
            self.loss_fraction.0,
            self.loss_fraction.1,
            self.subsets.len()
        )
    }
}

fn wrap(r: algos::PartitionResult, inst: &spassign_core::Instance) -> PyResult<PyPartitionResult> {
    let opt = optimum(inst).map_err(err)?.1;
    let report = r.report(inst, opt).map_err(err)?;
    Ok(PyPartitionResult {
        algorithm: r.algorithm.to_string(),
        seed: r.seed,
        pairs: r.assignment.pairs().to_vec(),
        subsets: r.partition.subsets().to_vec(),
        paper_subsets: r.partition.paper_subsets().map(<[_]>::to_vec),
        dummy_agents: r.dummy_agents,
        value: r.value.to_f64(),
        value_exact: r.value.to_string(),
        opt: opt.to_f64(),
        loss_fraction: (*report.loss_fraction.numer(), *report.loss_fraction.denom()),
    })
}

/// Unconstrained optimal assignment: `(pairs, total_similarity)`.
#[pyfunction]
fn solve(instance: &PyInstance) -> PyResult<(Vec<(usize, usize)>, f64)> {
    let (m, v) = optimum(&instance.inner).map_err(err)?;
    Ok((m.pairs().to_vec(), v.to_f64()))
}

/// Runs one of `random`, `cycle`, `coloring`, `multi`, `general`,
/// `random-components`.
#[pyfunction]
#[pyo3(signature = (instance, algorithm, seed = 0))]
fn partition(instance: &PyInstance, algorithm: &str, seed: u64) -> PyResult<PyPartitionResult> {
    let algo: Algorithm = algorithm.parse().map_err(err)?;
    wrap(algos::run(algo, &instance.inner, seed).map_err(err)?, &instance.inner)
}

type OracleOutput = (Vec<Vec<usize>>, Vec<(usize, usize)>, f64);

/// Best balanced bipartition by exhaustive search: `(subsets, pairs, value)`.
#[pyfunction]
fn oracle(instance: &PyInstance) -> PyResult<OracleOutput> {
    let (p, m, v) = oracles::brute_force_partition_opt(&instance.inner, instance.inner.k()).map_err(err)?;
    Ok((p.subsets().to_vec(), m.pairs().to_vec(), v.to_f64()))
}

#[pyfunction]
fn gen_theorem2(n: usize, k: usize) -> PyResult<PyInstance> {
    Ok(PyInstance { inner: generators::gen_theorem2(n, k).map_err(err)? })
}

#[pyfunction]
fn gen_theorem6(n: usize, k: usize) -> PyResult<PyInstance> {
    Ok(PyInstance { inner: generators::gen_theorem6(n, k).map_err(err)? })
}

#[pyfunction]
#[pyo3(signature = (n, k, seed, family = "uniform-random"))]
fn gen_random(n: usize, k: usize, seed: u64, family: &str) -> PyResult<PyInstance> {
    Ok(PyInstance { inner: generators::gen_random(n, k, seed, self::family(family)?).map_err(err)? })
}

#[pyfunction]
#[pyo3(signature = (n_agents, n_papers, agent_load, paper_load, max_authors, seed, family = "uniform-random"))]
fn gen_random_general(
    n_agents: usize,
    n_papers: usize,
    agent_load: usize,
    paper_load: usize,
    max_authors: usize,
    seed: u64,
    family: &str,
) -> PyResult<PyInstance> {
    let loads = Loads { agent: agent_load, paper: paper_load };
    let inner = generators::gen_random_general(n_agents, n_papers, loads, max_authors, seed, self::family(family)?)
        .map_err(err)?;
    Ok(PyInstance { inner })
}

/// Violations of an assignment (and optional agent partition); empty when valid.
#[pyfunction]
#[pyo3(signature = (instance, pairs, subsets = None, paper_subsets = None))]
fn validate(
    instance: &PyInstance,
    pairs: Vec<(usize, usize)>,
    subsets: Option<Vec<Vec<usize>>>,
    paper_subsets: Option<Vec<Vec<usize>>>,
) -> Vec<String> {
    let part = subsets.map(|s| {
        let p = if s.len() == 2 {
            let mut it = s.into_iter();
            Partition::bipartition(it.next().unwrap(), it.next().unwrap())
        } else {
            Partition::multi(s)
        };
        match paper_subsets {
            Some(ps) => p.with_paper_subsets(ps),
            None => p,
        }
    });
    spassign_core::validate(&instance.inner, &Assignment::from_pairs(pairs), part.as_ref())
        .violations
        .iter()
        .map(ToString::to_string)
        .collect()
}

/// Two-sample Kolmogorov-Smirnov test with an asymptotic p-value.
#[pyfunction]
fn ks_two_sample<'py>(py: Python<'py>, a: Vec<f64>, b: Vec<f64>) -> PyResult<Bound<'py, PyDict>> {
    let r = stats::ks_two_sample(&scores(&a), &scores(&b)).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("d", r.d)?;
    d.set_item("d_exact", (*r.d_exact.numer(), *r.d_exact.denom()))?;
    d.set_item("p", r.p)?;
    d.set_item("n_a", r.n_a)?;
    d.set_item("n_b", r.n_b)?;
    Ok(d)
}

/// Agent labels of a partition given as a list of subsets.
#[pyfunction]
fn labels(subsets: Vec<Vec<usize>>) -> Vec<usize> {
    let n = subsets.iter().flatten().map(|&x| x + 1).max().unwrap_or(0);
    Partition::multi(subsets).labels(n)
}

#[pymodule]
fn spassign(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyInstance>()?;
    m.add_class::<PyPartitionResult>()?;
    m.add_function(wrap_pyfunction!(solve, m)?)?;
    m.add_function(wrap_pyfunction!(partition, m)?)?;
    m.add_function(wrap_pyfunction!(oracle, m)?)?;
    m.add_function(wrap_pyfunction!(gen_theorem2, m)?)?;
    m.add_function(wrap_pyfunction!(gen_theorem6, m)?)?;
    m.add_function(wrap_pyfunction!(gen_random, m)?)?;
    m.add_function(wrap_pyfunction!(gen_random_general, m)?)?;
    m.add_function(wrap_pyfunction!(validate, m)?)?;
    m.add_function(wrap_pyfunction!(ks_two_sample, m)?)?;
    m.add_function(wrap_pyfunction!(labels, m)?)?;
    Ok(())
}
