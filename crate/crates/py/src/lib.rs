//! Python bindings: a `Graph` class plus the closed-form predictions as plain functions.
//!
//! Reports come back as ordinary dicts with the same keys as the CLI's JSON.

use std::path::PathBuf;

use drgg::fit::{fit_model, FitMethod};
use drgg::io::{self as dio, EdgeListFormat, LabeledEdgeList};
use drgg::stats::{compute_stats, degree_histograms, PathMode, PathOptions, StatsOptions};
use drgg::{theory, DiGraph, DrggError, ModelParams, TorusPointSet};
use pyo3::create_exception;
use pyo3::exceptions::{PyIOError, PyValueError};
use pyo3::prelude::*;
use serde::Serialize;

create_exception!(drgg, InfeasibleError, PyValueError, "The model cannot be realized for these parameters.");
create_exception!(drgg, InsufficientDataError, PyValueError, "The data do not support the requested fit.");

fn to_py(e: DrggError) -> PyErr {
    let msg = e.to_string();
    match e {
        DrggError::Infeasible { .. } => InfeasibleError::new_err(msg),
        DrggError::InsufficientData(_) => InsufficientDataError::new_err(msg),
        DrggError::Io(_) => PyIOError::new_err(msg),
        _ => PyValueError::new_err(msg),
    }
}

trait OrPy<T> {
    fn py_err(self) -> PyResult<T>;
}

impl<T> OrPy<T> for drgg::Result<T> {
    fn py_err(self) -> PyResult<T> {
        self.map_err(to_py)
    }
}

/// Round-trips a serializable report through `json.loads` so Python sees plain dicts.
fn to_dict<'py, T: Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = dio::report_to_string(value).py_err()?;
    py.import("json")?.call_method1("loads", (text,))
}

fn edge_format(path: &std::path::Path, format: Option<&str>) -> PyResult<EdgeListFormat> {
    match format {
        None => Ok(EdgeListFormat::from_path(path)),
        Some("tsv") => Ok(EdgeListFormat::Tsv),
        Some("csv") => Ok(EdgeListFormat::Csv),
        Some(other) => {
            Err(PyValueError::new_err(format!("unknown edge list format {other:?}; use \"tsv\" or \"csv\"")))
        }
    }
}

/// A directed graph, either generated on the torus (with positions and radii)
/// or ingested from a labeled edge list.
#[pyclass(name = "Graph", module = "drgg", frozen)]
struct PyGraph {
    points: Option<TorusPointSet>,
    graph: DiGraph,
    labels: Option<Vec<String>>,
}

#[pymethods]
impl PyGraph {
    /// Samples a graph. `fixed_radius=True` gives every vertex radius `r0` and ignores `alpha`.
    #[staticmethod]
    #[pyo3(signature = (n, alpha, d, seed = 0, fixed_radius = false))]
    fn generate(py: Python<'_>, n: usize, alpha: f64, d: usize, seed: u64, fixed_radius: bool) -> PyResult<Self> {
        let params =
            if fixed_radius { ModelParams::fixed_radius(n, d, seed) } else { ModelParams::new(n, alpha, d, seed) };
        let (pts, g) = py.detach(|| drgg::generate(&params)).py_err()?;
        Ok(PyGraph { points: Some(pts), graph: g, labels: None })
    }

    /// Loads a graph file written by `write` or by `drgg generate`.
    #[staticmethod]
    fn read(py: Python<'_>, path: PathBuf) -> PyResult<Self> {
        let (pts, g) = py.detach(|| dio::read_graph(&path)).py_err()?;
        Ok(PyGraph { points: Some(pts), graph: g, labels: None })
    }

    /// Loads a `source<TAB>target` (or CSV) edge list. Self-loops and duplicates are dropped.
    #[staticmethod]
    #[pyo3(signature = (path, format = None, reverse = false))]
    fn read_edge_list(path: PathBuf, format: Option<&str>, reverse: bool) -> PyResult<Self> {
        let mut list = dio::read_edge_list(&path, edge_format(&path, format)?).py_err()?;
        if reverse {
            list = list.reversed();
        }
        Ok(PyGraph { points: None, graph: list.to_digraph(), labels: Some(list.labels) })
    }

    /// Builds a graph from `(source, target)` index pairs on vertices `0..n`.
    #[staticmethod]
    fn from_edges(n: usize, edges: Vec<(usize, usize)>) -> PyResult<Self> {
        Ok(PyGraph { points: None, graph: DiGraph::from_edges(n, edges).py_err()?, labels: None })
    }

    /// Writes the graph file. Only graphs that carry positions can be written this way.
    #[pyo3(signature = (path, edges = true))]
    fn write(&self, path: PathBuf, edges: bool) -> PyResult<()> {
        let pts =
            self.points.as_ref().ok_or_else(|| PyValueError::new_err("graph has no positions; use write_edge_list"))?;
        dio::write_graph(pts, edges.then_some(&self.graph), &path).py_err()
    }

    #[pyo3(signature = (path, format = None))]
    fn write_edge_list(&self, path: PathBuf, format: Option<&str>) -> PyResult<()> {
        let mut list = LabeledEdgeList::from_digraph(&self.graph);
        if let Some(labels) = &self.labels {
            list.labels = labels.clone();
        }
        dio::write_edge_list(&list, &path, edge_format(&path, format)?).py_err()
    }

    #[getter]
    fn n(&self) -> usize {
        self.graph.vertex_count()
    }

    #[getter]
    fn edge_count(&self) -> usize {
        self.graph.edge_count()
    }

    /// Torus dimension, or `None` for an ingested graph.
    #[getter]
    fn dim(&self) -> Option<usize> {
        self.points.as_ref().map(TorusPointSet::dim)
    }

    #[getter]
    fn labels(&self) -> Option<Vec<String>> {
        self.labels.clone()
    }

    fn edges(&self) -> Vec<(usize, usize)> {
        self.graph.edges().collect()
    }

    fn in_degrees(&self) -> Vec<usize> {
        (0..self.graph.vertex_count()).map(|v| self.graph.in_degree(v)).collect()
    }

    fn out_degrees(&self) -> Vec<usize> {
        (0..self.graph.vertex_count()).map(|v| self.graph.out_degree(v)).collect()
    }

    /// One coordinate row per vertex.
    fn positions(&self) -> Option<Vec<Vec<f64>>> {
        self.points.as_ref().map(|p| p.positions().chunks(p.dim()).map(<[f64]>::to_vec).collect())
    }

    fn radii(&self) -> Option<Vec<f64>> {
        self.points.as_ref().map(|p| p.radii().to_vec())
    }

    /// The largest weakly connected component, with labels carried over.
    fn largest_weak_component(&self) -> Self {
        let keep = self.graph.largest_weak_component();
        PyGraph {
            points: None,
            graph: self.graph.induced_subgraph(&keep),
            labels: self.labels.as_ref().map(|l| keep.iter().map(|&i| l[i].clone()).collect()),
        }
    }

    /// Degree histograms, triangle census, clustering, reciprocity, paths and hubs.
    #[pyo3(signature = (undirected = false, sample_paths = None, exact_threshold = 20_000, path_seed = 0, hubs = 20))]
    fn stats<'py>(
        &self,
        py: Python<'py>,
        undirected: bool,
        sample_paths: Option<usize>,
        exact_threshold: usize,
        path_seed: u64,
        hubs: usize,
    ) -> PyResult<Bound<'py, PyAny>> {
        let mut paths = PathOptions {
            mode: if undirected { PathMode::UndirectedProjection } else { PathMode::Directed },
            exact_threshold,
            seed: path_seed,
            ..PathOptions::default()
        };
        if let Some(k) = sample_paths {
            paths.exact_threshold = 0;
            paths.sample_sources = k;
        }
        let opts = StatsOptions { paths, hubs };
        let report = py.detach(|| compute_stats(&self.graph, self.labels.as_deref(), &opts)).py_err()?;
        to_dict(py, &report)
    }

    fn reciprocity(&self) -> Option<f64> {
        drgg::stats::reciprocity(&self.graph).ok()
    }

    /// Fits `alpha` for dimension `d` from the degree data. `method` is `"mle"` or `"loglog"`.
    #[pyo3(signature = (d, method = "mle"))]
    fn fit<'py>(&self, py: Python<'py>, d: usize, method: &str) -> PyResult<Bound<'py, PyAny>> {
        let method = match method {
            "mle" => FitMethod::MleTail,
            "loglog" => FitMethod::LoglogLs,
            other => {
                return Err(PyValueError::new_err(format!("unknown fit method {other:?}; use \"mle\" or \"loglog\"")))
            }
        };
        let (hin, hout) = degree_histograms(&self.graph);
        let fit = fit_model(&hin, &hout, self.graph.vertex_count(), d, method).py_err()?;
        to_dict(py, &fit)
    }

    fn __len__(&self) -> usize {
        self.graph.vertex_count()
    }

    fn __repr__(&self) -> String {
        let kind = match self.points.as_ref().and_then(TorusPointSet::params) {
            Some(p) if p.alpha.is_finite() => format!(", alpha={}, d={}, seed={}", p.alpha, p.d, p.seed),
            Some(p) => format!(", fixed_radius, d={}, seed={}", p.d, p.seed),
            None => String::new(),
        };
        format!("Graph(n={}, edges={}{kind})", self.graph.vertex_count(), self.graph.edge_count())
    }
}

/// All predictions for `(n, alpha, d)` as a dict.
#[pyfunction]
#[pyo3(signature = (n, alpha, d, max_path_k = 20))]
fn theory_report<'py>(
    py: Python<'py>,
    n: usize,
    alpha: f64,
    d: usize,
    max_path_k: usize,
) -> PyResult<Bound<'py, PyAny>> {
    let report = py.detach(|| theory::theory_report(n, alpha, d, max_path_k)).py_err()?;
    to_dict(py, &report)
}

#[pyfunction]
fn min_radius(n: usize, d: usize) -> PyResult<f64> {
    drgg::geometry::min_radius(n, d).py_err()
}

#[pyfunction]
fn edge_prob_exact(n: usize, alpha: f64, d: usize) -> PyResult<f64> {
    theory::edge_prob_exact(n, alpha, d).py_err()
}

#[pyfunction]
fn expected_edges(n: usize, alpha: f64, d: usize) -> PyResult<f64> {
    theory::expected_edges(n, alpha, d).py_err()
}

#[pyfunction]
fn indegree_pdf_exact(n: usize, alpha: f64, d: usize, k: usize) -> PyResult<f64> {
    theory::indegree_pdf_exact(n, alpha, d, k).py_err()
}

#[pyfunction]
fn indegree_pdf_approx(n: usize, alpha: f64, d: usize, k: usize) -> PyResult<f64> {
    theory::indegree_pdf_approx(n, alpha, d, k).py_err()
}

#[pyfunction]
fn clustering_constant(alpha: f64, d: usize) -> PyResult<f64> {
    theory::clustering_constant(alpha, d).py_err()
}

#[pyfunction]
fn reciprocity_limit(alpha: f64, d: usize) -> PyResult<f64> {
    theory::reciprocity_limit(alpha, d).py_err()
}

#[pyfunction]
fn expected_paths(n: usize, k: usize, z: f64) -> PyResult<f64> {
    theory::expected_paths(n, k, z).py_err()
}

#[pyfunction]
fn pair_distance_cdf(r: f64, radius: f64, d: usize) -> PyResult<f64> {
    theory::pair_distance_cdf(r, radius, d).py_err()
}

#[pymodule]
#[pyo3(name = "drgg")]
fn drgg_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGraph>()?;
    m.add("InfeasibleError", m.py().get_type::<InfeasibleError>())?;
    m.add("InsufficientDataError", m.py().get_type::<InsufficientDataError>())?;
    m.add_function(wrap_pyfunction!(theory_report, m)?)?;
    m.add_function(wrap_pyfunction!(min_radius, m)?)?;
    m.add_function(wrap_pyfunction!(edge_prob_exact, m)?)?;
    m.add_function(wrap_pyfunction!(expected_edges, m)?)?;
    m.add_function(wrap_pyfunction!(indegree_pdf_exact, m)?)?;
    m.add_function(wrap_pyfunction!(indegree_pdf_approx, m)?)?;
    m.add_function(wrap_pyfunction!(clustering_constant, m)?)?;
    m.add_function(wrap_pyfunction!(reciprocity_limit, m)?)?;
    m.add_function(wrap_pyfunction!(expected_paths, m)?)?;
    m.add_function(wrap_pyfunction!(pair_distance_cdf, m)?)?;
    Ok(())
}
