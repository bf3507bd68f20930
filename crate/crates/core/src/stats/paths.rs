//! Shortest-path statistics by breadth-first search.
//!
//! Sources are processed 64 at a time: every vertex keeps one bit per source
//! in a `u64`, so one sweep over the adjacency advances 64 searches by a level.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{DrggError, Result};
use crate::graph::DiGraph;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PathMode {
    Directed,
    /// Every edge made bidirectional before searching.
    UndirectedProjection,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathOptions {
    pub mode: PathMode,
    /// Graphs with at most this many vertices get an all-sources search.
    pub exact_threshold: usize,
    /// Number of uniformly sampled sources above the threshold.
    pub sample_sources: usize,
    pub seed: u64,
}

impl Default for PathOptions {
    fn default() -> Self {
        PathOptions { mode: PathMode::Directed, exact_threshold: 20_000, sample_sources: 256, seed: 0 }
    }
}

impl PathOptions {
    pub fn undirected() -> Self {
        PathOptions { mode: PathMode::UndirectedProjection, ..Self::default() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathStats {
    pub mode: PathMode,
    /// Largest finite distance seen. A lower bound on the diameter when `exact` is false.
    pub diameter: u32,
    /// Mean over reachable ordered pairs `(s, t)`, `s != t`.
    pub avg_path_length: f64,
    /// Reachable ordered pairs over all ordered pairs examined.
    pub reachable_fraction: f64,
    pub exact: bool,
    pub sources: usize,
}

#[derive(Default, Clone, Copy)]
struct BatchResult {
    max_dist: u32,
    dist_sum: u64,
    reached: u64,
}

fn bfs_batch(g: &DiGraph, sources: &[usize]) -> BatchResult {
    debug_assert!(!sources.is_empty() && sources.len() <= 64);
    let n = g.vertex_count();
    let full = if sources.len() == 64 { u64::MAX } else { (1u64 << sources.len()) - 1 };
    let mut seen = vec![0u64; n];
    let mut frontier = vec![0u64; n];
    let mut next = vec![0u64; n];
    for (bit, &s) in sources.iter().enumerate() {
        seen[s] |= 1 << bit;
        frontier[s] |= 1 << bit;
    }
    let mut out = BatchResult::default();
    let mut level = 0u32;
    loop {
        level += 1;
        let mut advanced = false;
        for w in 0..n {
            if seen[w] == full {
                next[w] = 0;
                continue;
            }
            let reach = g.in_neighbors(w).iter().fold(0u64, |acc, &v| acc | frontier[v as usize]);
            let fresh = reach & !seen[w];
            next[w] = fresh;
            if fresh != 0 {
                seen[w] |= fresh;
                let c = fresh.count_ones() as u64;
                out.reached += c;
                out.dist_sum += c * level as u64;
                advanced = true;
            }
        }
        if !advanced {
            return out;
        }
        out.max_dist = level;
        std::mem::swap(&mut frontier, &mut next);
    }
}

fn choose_sources(n: usize, opts: &PathOptions) -> (Vec<usize>, bool) {
    if n <= opts.exact_threshold || opts.sample_sources >= n {
        return ((0..n).collect(), true);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut picked = rand::seq::index::sample(&mut rng, n, opts.sample_sources.max(1)).into_vec();
    picked.sort_unstable();
    (picked, false)
}

/// Diameter, average path length and reachable fraction; exact below the threshold,
/// estimated from sampled sources above it.
pub fn shortest_path_stats(g: &DiGraph, opts: &PathOptions) -> Result<PathStats> {
    let n = g.vertex_count();
    if n < 2 {
        return Err(DrggError::invalid("path statistics need at least two vertices"));
    }
    let projected;
    let graph = match opts.mode {
        PathMode::Directed => g,
        PathMode::UndirectedProjection => {
            projected = g.undirected_projection();
            &projected
        }
    };
    let (sources, exact) = choose_sources(n, opts);
    let total =
        sources.par_chunks(64).map(|batch| bfs_batch(graph, batch)).reduce(BatchResult::default, |a, b| BatchResult {
            max_dist: a.max_dist.max(b.max_dist),
            dist_sum: a.dist_sum + b.dist_sum,
            reached: a.reached + b.reached,
        });
    if total.reached == 0 {
        return Err(DrggError::UndefinedStatistic("no pair of distinct vertices is connected".into()));
    }
    let pairs = sources.len() as f64 * (n - 1) as f64;
    Ok(PathStats {
        mode: opts.mode,
        diameter: total.max_dist,
        avg_path_length: total.dist_sum as f64 / total.reached as f64,
        reachable_fraction: total.reached as f64 / pairs,
        exact,
        sources: sources.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::VecDeque;

    fn plain_bfs(g: &DiGraph, s: usize) -> Vec<Option<u32>> {
        let mut dist = vec![None; g.vertex_count()];
        dist[s] = Some(0);
        let mut q = VecDeque::from([s]);
        while let Some(v) = q.pop_front() {
            for &w in g.out_neighbors(v) {
                if dist[w as usize].is_none() {
                    dist[w as usize] = Some(dist[v].unwrap() + 1);
                    q.push_back(w as usize);
                }
            }
        }
        dist
    }

    #[test]
    fn path_examples() {
        let g = DiGraph::from_edges(3, [(0, 1), (1, 2)]).unwrap();
        let s = shortest_path_stats(&g, &PathOptions::default()).unwrap();
        assert_eq!(s.diameter, 2);
        assert!((s.avg_path_length - 4.0 / 3.0).abs() < 1e-15);
        assert_eq!(s.reachable_fraction, 0.5);
        assert!(s.exact);

        let s = shortest_path_stats(&g, &PathOptions::undirected()).unwrap();
        assert_eq!(s.diameter, 2);
        assert!((s.avg_path_length - 4.0 / 3.0).abs() < 1e-15);
        assert_eq!(s.reachable_fraction, 1.0);
    }

    #[test]
    fn errors() {
        assert!(shortest_path_stats(&DiGraph::empty(1), &PathOptions::default()).is_err());
        assert!(matches!(
            shortest_path_stats(&DiGraph::empty(4), &PathOptions::default()),
            Err(DrggError::UndefinedStatistic(_))
        ));
    }

    #[test]
    fn bit_parallel_matches_queue_bfs() {
        // a sparse pseudo-random digraph with more than 64 vertices
        let n = 150;
        let edges: Vec<(usize, usize)> = (0..n)
            .flat_map(|u| [(u, (u * 7 + 3) % n), (u, (u * 13 + 1) % n), (u, (u + 1) % n)])
            .filter(|(u, v)| u != v)
            .collect::<std::collections::BTreeSet<_>>()
            .into_iter()
            .collect();
        let g = DiGraph::from_edges(n, edges).unwrap();
        let (mut max, mut sum, mut cnt) = (0, 0u64, 0u64);
        for s in 0..n {
            for (t, d) in plain_bfs(&g, s).into_iter().enumerate() {
                if let (true, Some(d)) = (t != s, d) {
                    max = max.max(d);
                    sum += d as u64;
                    cnt += 1;
                }
            }
        }
        let st = shortest_path_stats(&g, &PathOptions::default()).unwrap();
        assert_eq!(st.diameter, max);
        assert!((st.avg_path_length - sum as f64 / cnt as f64).abs() < 1e-12);

        let sampled =
            shortest_path_stats(&g, &PathOptions { exact_threshold: 10, sample_sources: 20, ..PathOptions::default() })
                .unwrap();
        assert!(!sampled.exact);
        assert_eq!(sampled.sources, 20);
        assert!(sampled.diameter <= max);
    }
}
