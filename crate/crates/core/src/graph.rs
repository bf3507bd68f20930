use crate::error::{DrggError, Result};

/// Immutable simple directed graph with sorted forward and reverse adjacency.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiGraph {
    n: usize,
    out_offsets: Vec<usize>,
    out_targets: Vec<u32>,
    in_offsets: Vec<usize>,
    in_sources: Vec<u32>,
}

fn check_vertex_count(n: usize) -> Result<()> {
    if n > u32::MAX as usize {
        return Err(DrggError::invalid(format!("{n} vertices exceed the u32 id space")));
    }
    Ok(())
}

/// Builds CSR offsets and neighbor lists from (key, value) pairs sorted by key then value.
fn csr(n: usize, pairs: &[(u32, u32)]) -> (Vec<usize>, Vec<u32>) {
    let mut offsets = vec![0usize; n + 1];
    for &(k, _) in pairs {
        offsets[k as usize + 1] += 1;
    }
    for i in 0..n {
        offsets[i + 1] += offsets[i];
    }
    (offsets, pairs.iter().map(|&(_, v)| v).collect())
}

impl DiGraph {
    /// Builds a graph from `(source, target)` pairs. Self-loops and duplicates are rejected.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        check_vertex_count(n)?;
        let mut pairs = Vec::new();
        for (u, v) in edges {
            if u >= n || v >= n {
                return Err(DrggError::invalid(format!("edge ({u}, {v}) out of range for n = {n}")));
            }
            if u == v {
                return Err(DrggError::invalid(format!("self-loop at vertex {u}")));
            }
            pairs.push((u as u32, v as u32));
        }
        pairs.sort_unstable();
        if let Some(w) = pairs.windows(2).find(|w| w[0] == w[1]) {
            return Err(DrggError::invalid(format!("duplicate edge ({}, {})", w[0].0, w[0].1)));
        }
        Ok(Self::from_sorted_pairs(n, pairs))
    }

    fn from_sorted_pairs(n: usize, pairs: Vec<(u32, u32)>) -> Self {
        let (out_offsets, out_targets) = csr(n, &pairs);
        let mut rev: Vec<(u32, u32)> = pairs.into_iter().map(|(u, v)| (v, u)).collect();
        rev.sort_unstable();
        let (in_offsets, in_sources) = csr(n, &rev);
        DiGraph { n, out_offsets, out_targets, in_offsets, in_sources }
    }

    /// Builds a graph from per-vertex in-neighbor lists (`in_lists[v]` = all `u` with `u ↝ v`).
    ///
    /// Lists must be sorted, duplicate-free and must not contain `v` itself.
    pub(crate) fn from_in_lists(in_lists: Vec<Vec<u32>>) -> Self {
        let n = in_lists.len();
        let mut in_offsets = Vec::with_capacity(n + 1);
        in_offsets.push(0);
        let total: usize = in_lists.iter().map(Vec::len).sum();
        let mut in_sources = Vec::with_capacity(total);
        let mut out_deg = vec![0usize; n];
        for list in &in_lists {
            debug_assert!(list.windows(2).all(|w| w[0] < w[1]));
            for &u in list {
                out_deg[u as usize] += 1;
            }
            in_sources.extend_from_slice(list);
            in_offsets.push(in_sources.len());
        }
        let mut out_offsets = vec![0usize; n + 1];
        for u in 0..n {
            out_offsets[u + 1] = out_offsets[u] + out_deg[u];
        }
        let mut cursor = out_offsets.clone();
        let mut out_targets = vec![0u32; total];
        // targets arrive in increasing v, so each out-list ends up sorted
        for (v, list) in in_lists.iter().enumerate() {
            for &u in list {
                out_targets[cursor[u as usize]] = v as u32;
                cursor[u as usize] += 1;
            }
        }
        DiGraph { n, out_offsets, out_targets, in_offsets, in_sources }
    }

    pub fn empty(n: usize) -> Self {
        DiGraph {
            n,
            out_offsets: vec![0; n + 1],
            out_targets: Vec::new(),
            in_offsets: vec![0; n + 1],
            in_sources: Vec::new(),
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.out_targets.len()
    }

    /// Successors of `u`, ascending.
    pub fn out_neighbors(&self, u: usize) -> &[u32] {
        &self.out_targets[self.out_offsets[u]..self.out_offsets[u + 1]]
    }

    /// Predecessors of `v`, ascending.
    pub fn in_neighbors(&self, v: usize) -> &[u32] {
        &self.in_sources[self.in_offsets[v]..self.in_offsets[v + 1]]
    }

    pub fn out_degree(&self, u: usize) -> usize {
        self.out_offsets[u + 1] - self.out_offsets[u]
    }

    pub fn in_degree(&self, v: usize) -> usize {
        self.in_offsets[v + 1] - self.in_offsets[v]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.out_neighbors(u).binary_search(&(v as u32)).is_ok()
    }

    /// All edges in lexicographic `(source, target)` order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |u| self.out_neighbors(u).iter().map(move |&v| (u, v as usize)))
    }

    /// Every edge made bidirectional.
    pub fn undirected_projection(&self) -> DiGraph {
        let mut lists: Vec<Vec<u32>> = (0..self.n)
            .map(|v| {
                let mut l: Vec<u32> = self.in_neighbors(v).to_vec();
                l.extend_from_slice(self.out_neighbors(v));
                l.sort_unstable();
                l.dedup();
                l
            })
            .collect();
        lists.shrink_to_fit();
        DiGraph::from_in_lists(lists)
    }

    /// Every edge reversed.
    pub fn reversed(&self) -> DiGraph {
        DiGraph {
            n: self.n,
            out_offsets: self.in_offsets.clone(),
            out_targets: self.in_sources.clone(),
            in_offsets: self.out_offsets.clone(),
            in_sources: self.out_targets.clone(),
        }
    }

    /// Subgraph induced by `keep` (ascending vertex ids), relabelled `0..keep.len()`.
    pub fn induced_subgraph(&self, keep: &[usize]) -> DiGraph {
        let mut index = vec![u32::MAX; self.n];
        for (i, &v) in keep.iter().enumerate() {
            index[v] = i as u32;
        }
        let lists = keep
            .iter()
            .map(|&v| {
                let mut l: Vec<u32> =
                    self.in_neighbors(v).iter().map(|&u| index[u as usize]).filter(|&u| u != u32::MAX).collect();
                l.sort_unstable();
                l
            })
            .collect();
        DiGraph::from_in_lists(lists)
    }

    /// Vertices of the largest weakly connected component, ascending.
    /// Ties go to the component containing the smallest vertex id.
    pub fn largest_weak_component(&self) -> Vec<usize> {
        let mut comp = vec![usize::MAX; self.n];
        let mut best: (usize, usize) = (0, 0);
        let mut stack = Vec::new();
        for start in 0..self.n {
            if comp[start] != usize::MAX {
                continue;
            }
            comp[start] = start;
            stack.push(start);
            let mut size = 0;
            while let Some(v) = stack.pop() {
                size += 1;
                for &w in self.out_neighbors(v).iter().chain(self.in_neighbors(v)) {
                    let w = w as usize;
                    if comp[w] == usize::MAX {
                        comp[w] = start;
                        stack.push(w);
                    }
                }
            }
            if size > best.1 {
                best = (start, size);
            }
        }
        (0..self.n).filter(|&v| comp[v] == best.0).collect()
    }
}
