//! Empirical statistics of a directed graph, generated or ingested.

mod degree;
mod paths;
mod triangles;

pub use degree::{degree_histograms, top_hubs, DegreeHistogram};
pub use paths::{shortest_path_stats, PathMode, PathOptions, PathStats};
pub use triangles::{
    clustering_in, clustering_undirected, count_triangles, cycle_without_acyclic_count, InClustering, TriangleCensus,
};

use serde::{Deserialize, Serialize};

use crate::error::{DrggError, Result};
use crate::graph::DiGraph;

/// Fraction of edges whose reverse edge also exists.
pub fn reciprocity(g: &DiGraph) -> Result<f64> {
    let m = g.edge_count();
    if m == 0 {
        return Err(DrggError::UndefinedStatistic("reciprocity of a graph without edges".into()));
    }
    let mutual = g.edges().filter(|&(u, v)| g.has_edge(v, u)).count();
    Ok(mutual as f64 / m as f64)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Hub {
    pub vertex: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub label: Option<String>,
    pub indegree: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatsOptions {
    pub paths: PathOptions,
    pub hubs: usize,
}

impl Default for StatsOptions {
    fn default() -> Self {
        StatsOptions { paths: PathOptions::default(), hubs: 20 }
    }
}

/// Everything measured on one graph.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatsReport {
    pub n: usize,
    pub edge_count: usize,
    pub in_hist: DegreeHistogram,
    pub out_hist: DegreeHistogram,
    pub triangles: TriangleCensus,
    pub clustering_in_excl: f64,
    pub clustering_in_all: f64,
    /// Average local clustering of the undirected projection.
    pub clustering_undirected: f64,
    /// `None` for a graph without edges.
    pub reciprocity: Option<f64>,
    /// `None` when no two distinct vertices are connected.
    pub paths: Option<PathStats>,
    pub hubs: Vec<Hub>,
}

pub fn compute_stats(g: &DiGraph, labels: Option<&[String]>, opts: &StatsOptions) -> Result<StatsReport> {
    let (in_hist, out_hist) = degree_histograms(g);
    let per_vertex = triangles::per_vertex_triangles(g);
    let census = per_vertex.iter().fold(TriangleCensus::default(), |acc, &(a, b)| TriangleCensus {
        type1_labeled: acc.type1_labeled + a,
        type2_labeled: acc.type2_labeled + b,
    });
    let clustering = triangles::in_clustering_from_counts(g, &per_vertex);
    drop(per_vertex);
    let reciprocity = match reciprocity(g) {
        Ok(r) => Some(r),
        Err(DrggError::UndefinedStatistic(_)) => None,
        Err(e) => return Err(e),
    };
    let paths = if g.vertex_count() < 2 {
        None
    } else {
        match shortest_path_stats(g, &opts.paths) {
            Ok(p) => Some(p),
            Err(DrggError::UndefinedStatistic(_)) => None,
            Err(e) => return Err(e),
        }
    };
    let hubs = top_hubs(g, opts.hubs)
        .into_iter()
        .map(|(vertex, indegree)| Hub { vertex, label: labels.and_then(|l| l.get(vertex).cloned()), indegree })
        .collect();
    Ok(StatsReport {
        n: g.vertex_count(),
        edge_count: g.edge_count(),
        in_hist,
        out_hist,
        triangles: census,
        clustering_in_excl: clustering.excl,
        clustering_in_all: clustering.all,
        clustering_undirected: clustering_undirected(g),
        reciprocity,
        paths,
        hubs,
    })
}
