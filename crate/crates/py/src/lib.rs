//! Python bindings: graphs, partitions, the summarization algorithms and the
//! benchmark runner.

use std::path::PathBuf;
use std::sync::Arc;

use pyo3::exceptions::{PyIndexError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use kbisim::bench::{
    run_algorithm, run_experiment_on, Algorithm, ExperimentConfig, InputSource, OutputFormat,
};
use kbisim::brs::GsmSpec;
use kbisim::graph::compute_statistics;
use kbisim::ingest::{
    fixtures, generate_synthetic, load_ntriples_files, parse_ntriples_str, GeneratorParams,
};
use kbisim::kaushik::naive_coarsest_partition;
use kbisim::oracle::{oracle, OracleVariant};
use kbisim::partition::is_stable_partition;
use kbisim::{partitions_equal, IngestionConfig, LabeledGraph, Partition, PartitionTrace};

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn runtime_err(e: impl std::fmt::Display) -> PyErr {
    PyRuntimeError::new_err(e.to_string())
}

fn ingestion(type_predicate: Option<String>, explode_label_sets: bool) -> IngestionConfig {
    let mut cfg = IngestionConfig { explode_label_sets, ..Default::default() };
    if let Some(p) = type_predicate {
        cfg.type_predicate = p;
    }
    cfg
}

/// A multi-relational labeled graph.
#[pyclass(name = "Graph", module = "kbisim", frozen)]
struct PyGraph {
    inner: Arc<LabeledGraph>,
}

impl PyGraph {
    fn wrap(g: LabeledGraph) -> Self {
        PyGraph { inner: Arc::new(g) }
    }

    fn check_vertex(&self, v: u32) -> PyResult<()> {
        if (v as usize) < self.inner.vertex_count() {
            Ok(())
        } else {
            Err(PyIndexError::new_err(format!("vertex {v} out of range")))
        }
    }
}

#[pymethods]
impl PyGraph {
    /// Parse N-Triples text.
    #[staticmethod]
    #[pyo3(signature = (text, type_predicate=None, explode_label_sets=false))]
    fn from_ntriples(text: &str, type_predicate: Option<String>, explode_label_sets: bool) -> PyResult<Self> {
        parse_ntriples_str(text, &ingestion(type_predicate, explode_label_sets))
            .map(Self::wrap)
            .map_err(value_err)
    }

    /// Load and merge N-Triples files (plain or gzipped).
    #[staticmethod]
    #[pyo3(signature = (paths, type_predicate=None, explode_label_sets=false))]
    fn load(paths: Vec<PathBuf>, type_predicate: Option<String>, explode_label_sets: bool) -> PyResult<Self> {
        load_ntriples_files(&paths, &ingestion(type_predicate, explode_label_sets))
            .map(Self::wrap)
            .map_err(value_err)
    }

    /// The ten-vertex researcher example.
    #[staticmethod]
    fn example() -> Self {
        Self::wrap(fixtures::example_graph())
    }

    #[staticmethod]
    #[pyo3(signature = (vertices, edges, seed=0, edge_labels=8, vertex_labels=16, max_labels=2, skew=1.0))]
    fn generate(
        vertices: usize,
        edges: usize,
        seed: u64,
        edge_labels: usize,
        vertex_labels: usize,
        max_labels: usize,
        skew: f64,
    ) -> PyResult<Self> {
        let params = GeneratorParams {
            vertex_count: vertices,
            edge_count: edges,
            edge_labels,
            vertex_labels,
            max_labels_per_vertex: max_labels,
            skew,
            seed,
        };
        generate_synthetic(&params).map(Self::wrap).map_err(value_err)
    }

    #[getter]
    fn vertex_count(&self) -> usize {
        self.inner.vertex_count()
    }

    /// Relational triples, one per edge label.
    #[getter]
    fn edge_count(&self) -> usize {
        self.inner.edge_count()
    }

    fn term(&self, v: u32) -> PyResult<String> {
        self.check_vertex(v)?;
        Ok(self.inner.term(v).to_string())
    }

    fn vertex(&self, term: &str) -> Option<u32> {
        self.inner.vertex_by_term(term)
    }

    fn vertex_labels(&self, v: u32) -> PyResult<Vec<String>> {
        self.check_vertex(v)?;
        let dict = self.inner.label_dict();
        Ok(dict.vertex.set_labels(self.inner.vertex_labels(v)).into_iter().map(String::from).collect())
    }

    /// `(source, target, [labels])` for every edge record.
    fn edges(&self) -> Vec<(u32, u32, Vec<String>)> {
        let dict = self.inner.label_dict();
        self.inner
            .edges()
            .map(|(u, w, l)| (u, w, dict.edge.set_labels(l).into_iter().map(String::from).collect()))
            .collect()
    }

    fn invert(&self) -> Self {
        Self::wrap(self.inner.invert())
    }

    fn stats<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let s = compute_statistics(&self.inner);
        let d = PyDict::new(py);
        d.set_item("vertices", s.vertices)?;
        d.set_item("edges", s.edges)?;
        d.set_item("edge_records", s.edge_records)?;
        d.set_item("vertex_labels", s.vertex_labels)?;
        d.set_item("vertex_label_sets", s.vertex_label_sets)?;
        d.set_item("edge_labels", s.edge_labels)?;
        d.set_item("self_loops", s.self_loops)?;
        d.set_item("mean_degree", s.degree.mean)?;
        d.set_item("max_degree", s.degree.max)?;
        Ok(d)
    }

    fn __eq__(&self, other: &PyGraph) -> bool {
        self.inner == other.inner
    }

    fn __repr__(&self) -> String {
        format!("Graph(vertices={}, edges={})", self.inner.vertex_count(), self.inner.edge_count())
    }
}

/// A partition of the vertex set into blocks.
#[pyclass(name = "Partition", module = "kbisim", frozen, from_py_object)]
#[derive(Clone)]
struct PyPartition {
    inner: Partition,
}

#[pymethods]
impl PyPartition {
    /// Build from one block key per vertex.
    #[staticmethod]
    fn from_keys(keys: Vec<i64>) -> Self {
        PyPartition { inner: Partition::from_keys(&keys) }
    }

    #[getter]
    fn block_count(&self) -> usize {
        self.inner.block_count()
    }

    #[getter]
    fn vertex_count(&self) -> usize {
        self.inner.vertex_count()
    }

    fn block_of(&self, v: u32) -> PyResult<u32> {
        if (v as usize) < self.inner.vertex_count() {
            Ok(self.inner.block_of(v))
        } else {
            Err(PyIndexError::new_err(format!("vertex {v} out of range")))
        }
    }

    /// Blocks as sorted vertex lists, ordered by smallest member.
    fn blocks(&self) -> Vec<Vec<u32>> {
        self.inner.canonical_blocks()
    }

    /// Tab-separated terms per block, sorted; the canonical text form.
    fn export(&self, graph: &PyGraph) -> PyResult<String> {
        if graph.inner.vertex_count() != self.inner.vertex_count() {
            return Err(value_err("partition and graph have different vertex counts"));
        }
        Ok(self.inner.export(&graph.inner))
    }

    fn refines(&self, coarse: &PyPartition) -> PyResult<bool> {
        self.inner.refines(&coarse.inner).map_err(value_err)
    }

    fn is_stable(&self, graph: &PyGraph) -> bool {
        is_stable_partition(&self.inner, &graph.inner)
    }

    fn __eq__(&self, other: &PyPartition) -> bool {
        partitions_equal(&self.inner, &other.inner).unwrap_or(false)
    }

    fn __len__(&self) -> usize {
        self.inner.block_count()
    }

    fn __repr__(&self) -> String {
        format!("Partition(vertices={}, blocks={})", self.inner.vertex_count(), self.inner.block_count())
    }
}

/// The result of one algorithm run.
#[pyclass(name = "Trace", module = "kbisim", frozen)]
struct PyTrace {
    inner: PartitionTrace,
}

#[pymethods]
impl PyTrace {
    #[getter]
    fn partition(&self) -> PyPartition {
        PyPartition { inner: self.inner.partition.clone() }
    }

    #[getter]
    fn initial_block_count(&self) -> usize {
        self.inner.initial_block_count
    }

    #[getter]
    fn block_counts(&self) -> Vec<usize> {
        self.inner.block_counts.clone()
    }

    #[getter]
    fn iteration_secs(&self) -> Vec<f64> {
        self.inner.iteration_times.iter().map(|d| d.as_secs_f64()).collect()
    }

    #[getter]
    fn init_secs(&self) -> f64 {
        self.inner.init_time.as_secs_f64()
    }

    #[getter]
    fn terminated_early(&self) -> bool {
        self.inner.terminated_early
    }

    #[getter]
    fn iterations_executed(&self) -> usize {
        self.inner.iterations_executed
    }

    fn __repr__(&self) -> String {
        format!(
            "Trace(blocks={:?}, early={})",
            self.inner.block_counts, self.inner.terminated_early
        )
    }
}

/// A graph summary model such as `cp((T,id,T),k=10)`.
#[pyclass(name = "GsmSpec", module = "kbisim", frozen, from_py_object)]
#[derive(Clone)]
struct PyGsmSpec {
    inner: GsmSpec,
}

#[pymethods]
impl PyGsmSpec {
    #[new]
    fn new(text: &str) -> PyResult<Self> {
        text.parse().map(|inner| PyGsmSpec { inner }).map_err(value_err)
    }

    #[staticmethod]
    fn schaetzle(k: usize) -> Self {
        PyGsmSpec { inner: GsmSpec::schaetzle(k) }
    }

    #[staticmethod]
    fn kaushik(k: usize) -> Self {
        PyGsmSpec { inner: GsmSpec::kaushik(k) }
    }

    #[getter]
    fn k(&self) -> usize {
        self.inner.k
    }

    #[getter]
    fn inverted(&self) -> bool {
        self.inner.inverted
    }

    fn with_k(&self, k: usize) -> Self {
        PyGsmSpec { inner: self.inner.with_k(k) }
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    fn __repr__(&self) -> String {
        format!("GsmSpec('{}')", self.inner)
    }

    fn __eq__(&self, other: &PyGsmSpec) -> bool {
        self.inner == other.inner
    }
}

fn parse_algorithm(name: &str) -> PyResult<Algorithm> {
    name.parse().map_err(value_err)
}

/// Run one algorithm by name (`native-schaetzle`, `native-kaushik`, `brs`,
/// `naive-pt` or an `oracle-*` variant).
#[pyfunction]
#[pyo3(signature = (graph, algorithm, k=10, gsm=None, exact=false))]
fn summarize(
    py: Python<'_>,
    graph: &PyGraph,
    algorithm: &str,
    k: usize,
    gsm: Option<PyGsmSpec>,
    exact: bool,
) -> PyResult<PyTrace> {
    let alg = parse_algorithm(algorithm)?;
    let g = graph.inner.clone();
    let spec = gsm.map(|s| s.inner);
    py.detach(move || run_algorithm(&g, alg, spec.as_ref(), k, exact))
        .map(|inner| PyTrace { inner })
        .map_err(runtime_err)
}

#[pyfunction]
#[pyo3(signature = (graph, k, exact=false))]
fn schaetzle(py: Python<'_>, graph: &PyGraph, k: usize, exact: bool) -> PyResult<PyTrace> {
    summarize(py, graph, "native-schaetzle", k, None, exact)
}

#[pyfunction]
fn kaushik(py: Python<'_>, graph: &PyGraph, k: usize) -> PyResult<PyTrace> {
    summarize(py, graph, "native-kaushik", k, None, false)
}

#[pyfunction]
#[pyo3(signature = (graph, gsm, exact=false))]
fn brs(py: Python<'_>, graph: &PyGraph, gsm: PyGsmSpec, exact: bool) -> PyResult<PyTrace> {
    let k = gsm.inner.k;
    summarize(py, graph, "brs", k, Some(gsm), exact)
}

/// Level-wise reference evaluation of one bisimulation definition.
#[pyfunction(name = "oracle")]
fn oracle_partition(graph: &PyGraph, variant: &str, k: usize) -> PyResult<PyPartition> {
    let variant: OracleVariant = variant.parse().map_err(value_err)?;
    Ok(PyPartition { inner: oracle(&graph.inner, variant, k) })
}

/// Coarsest stable refinement of the vertex-label partition.
#[pyfunction]
fn naive_coarsest(graph: &PyGraph) -> PyPartition {
    let p0 = Partition::by_vertex_labels(&graph.inner);
    PyPartition { inner: naive_coarsest_partition(p0, &graph.inner) }
}

/// Warm-up plus measured runs; returns the report as JSON text.
#[pyfunction]
#[pyo3(signature = (graph, algorithm, k=10, gsm=None, runs=5, warmup=1, threads=None))]
#[allow(clippy::too_many_arguments)]
fn benchmark(
    py: Python<'_>,
    graph: &PyGraph,
    algorithm: &str,
    k: usize,
    gsm: Option<PyGsmSpec>,
    runs: usize,
    warmup: usize,
    threads: Option<usize>,
) -> PyResult<String> {
    let cfg = ExperimentConfig {
        algorithm: parse_algorithm(algorithm)?,
        gsm: gsm.map(|s| s.inner),
        input: InputSource::Files(Vec::new()),
        k,
        warmup_runs: warmup,
        measured_runs: runs,
        threads,
        format: OutputFormat::Json,
        exact: false,
        memory_limit: None,
        explode_label_sets: false,
    };
    let g = graph.inner.clone();
    py.detach(move || run_experiment_on(&g, &cfg))
        .map(|r| r.to_json())
        .map_err(runtime_err)
}

#[pymodule(name = "kbisim")]
fn kbisim_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGraph>()?;
    m.add_class::<PyPartition>()?;
    m.add_class::<PyTrace>()?;
    m.add_class::<PyGsmSpec>()?;
    m.add_function(wrap_pyfunction!(summarize, m)?)?;
    m.add_function(wrap_pyfunction!(schaetzle, m)?)?;
    m.add_function(wrap_pyfunction!(kaushik, m)?)?;
    m.add_function(wrap_pyfunction!(brs, m)?)?;
    m.add_function(wrap_pyfunction!(oracle_partition, m)?)?;
    m.add_function(wrap_pyfunction!(naive_coarsest, m)?)?;
    m.add_function(wrap_pyfunction!(benchmark, m)?)?;
    Ok(())
}
