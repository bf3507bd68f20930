//! Directed triangle census and in-clustering.
//!
//! Type 1 (acyclic, apex `u`): ordered `(u, v, w)` with `v ↝ u`, `w ↝ u`, `v ↝ w`.
//! Type 2 (cycle): ordered `(u, v, w)` with `u ↝ v`, `v ↝ w`, `w ↝ u`; each
//! directed 3-cycle is counted once per rotation.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::graph::DiGraph;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TriangleCensus {
    pub type1_labeled: u64,
    pub type2_labeled: u64,
}

/// Per-vertex counts of type 1 triples with the vertex as apex, and of type 2
/// triples starting at the vertex.
pub(crate) fn per_vertex_triangles(g: &DiGraph) -> Vec<(u64, u64)> {
    let n = g.vertex_count();
    (0..n)
        .into_par_iter()
        .map_init(
            || vec![false; n],
            |mark, u| {
                let preds = g.in_neighbors(u);
                for &v in preds {
                    mark[v as usize] = true;
                }
                let mut t1 = 0u64;
                for &v in preds {
                    t1 += g.out_neighbors(v as usize).iter().filter(|&&w| mark[w as usize]).count() as u64;
                }
                let mut t2 = 0u64;
                for &v in g.out_neighbors(u) {
                    t2 += g.out_neighbors(v as usize).iter().filter(|&&w| mark[w as usize]).count() as u64;
                }
                for &v in preds {
                    mark[v as usize] = false;
                }
                (t1, t2)
            },
        )
        .collect()
}

pub fn count_triangles(g: &DiGraph) -> TriangleCensus {
    per_vertex_triangles(g).into_iter().fold(TriangleCensus::default(), |acc, (a, b)| TriangleCensus {
        type1_labeled: acc.type1_labeled + a,
        type2_labeled: acc.type2_labeled + b,
    })
}

/// Number of vertex sets that carry a directed 3-cycle but no acyclic pattern.
///
/// Always zero on DRGG outputs: the vertex with the smallest radius on a cycle
/// also points back to its predecessor.
pub fn cycle_without_acyclic_count(g: &DiGraph) -> usize {
    let acyclic = |a: usize, b: usize, c: usize| {
        // any apex, any ordered pair of the other two
        [(a, b, c), (b, a, c), (c, a, b)]
            .iter()
            .any(|&(apex, x, y)| g.has_edge(x, apex) && g.has_edge(y, apex) && (g.has_edge(x, y) || g.has_edge(y, x)))
    };
    (0..g.vertex_count())
        .into_par_iter()
        .map(|u| {
            let mut bad = 0;
            for &v in g.out_neighbors(u) {
                let v = v as usize;
                if v < u {
                    continue;
                }
                for &w in g.out_neighbors(v) {
                    let w = w as usize;
                    // report each cycle once, rooted at its smallest vertex
                    if w > u && g.has_edge(w, u) && !acyclic(u, v, w) {
                        bad += 1;
                    }
                }
            }
            bad
        })
        .sum()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InClustering {
    /// Mean of `c_u` over vertices with indegree at least 2.
    pub excl: f64,
    /// Sum of `c_u` over all vertices divided by `n` (indegree below 2 counts as 0).
    pub all: f64,
    /// `c_u`, or `None` when the indegree is below 2.
    pub per_vertex: Vec<Option<f64>>,
}

pub(crate) fn in_clustering_from_counts(g: &DiGraph, type1: &[(u64, u64)]) -> InClustering {
    let n = g.vertex_count();
    let per_vertex: Vec<Option<f64>> = (0..n)
        .map(|u| {
            let k = g.in_degree(u) as f64;
            (k >= 2.0).then(|| type1[u].0 as f64 / (k * (k - 1.0)))
        })
        .collect();
    let defined: Vec<f64> = per_vertex.iter().flatten().copied().collect();
    let sum: f64 = defined.iter().sum();
    InClustering {
        excl: if defined.is_empty() { 0.0 } else { sum / defined.len() as f64 },
        all: if n == 0 { 0.0 } else { sum / n as f64 },
        per_vertex,
    }
}

/// `c_u = |{(v, w) : v ↝ u, w ↝ u, v ↝ w}| / (d_u (d_u - 1))` with `d_u` the indegree.
pub fn clustering_in(g: &DiGraph) -> InClustering {
    in_clustering_from_counts(g, &per_vertex_triangles(g))
}

/// Average local clustering of the undirected projection; vertices of degree
/// below 2 contribute 0 and the sum is divided by `n`.
pub fn clustering_undirected(g: &DiGraph) -> f64 {
    let u = g.undirected_projection();
    let n = u.vertex_count();
    if n == 0 {
        return 0.0;
    }
    // on a symmetric graph the type 1 count at apex x is 2 × (triangles through x)
    let counts = per_vertex_triangles(&u);
    let sum: f64 = (0..n)
        .map(|x| {
            let k = u.in_degree(x) as f64;
            if k < 2.0 {
                0.0
            } else {
                counts[x].0 as f64 / (k * (k - 1.0))
            }
        })
        .sum();
    sum / n as f64
}
